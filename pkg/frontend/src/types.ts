// Payload shapes of the annotation service API.

export interface IngredientView {
  descriptor: string;
  path: string[];
}

export interface RecipeCard {
  id: string;
  title: string;
  ingredients: IngredientView[];
  instructions: string[];
}

export interface PairTask {
  status: "pair";
  position: number;
  total: number;
  judged: number;
  main: RecipeCard;
  secondary: RecipeCard;
  fused?: number;
}

export interface DoneTask {
  status: "done";
  judged: number;
  total: number;
}

export type NextTask = PairTask | DoneTask;

export type Verdict = "similar" | "not_similar";

export interface SubmitAck {
  status: "ok";
  judged: number;
  total: number;
}

export interface AgreementStats {
  total_pairs_judged_by_all: number;
  agreed_count: number;
  agreement_pct: number;
}
