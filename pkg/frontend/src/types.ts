/** Payload types mirroring the /api/v1 JSON contracts. */

export type Criterion = "C1" | "C2" | "C3" | "C4" | "C5";

export const CRITERIA: Criterion[] = ["C1", "C2", "C3", "C4", "C5"];

export interface RenderNode {
  id: string;
  kind: string; // class | abstract_class | interface | enum
  label: string;
  package: string | null;
  members: string[];
}

export interface RenderEdge {
  source: string;
  target: string;
  kind: string; // association | generalization | realization | aggregation | composition
  source_mult: string | null;
  target_mult: string | null;
  label: string | null;
}

export interface RenderGraph {
  nodes: RenderNode[];
  edges: RenderEdge[];
}

export interface RubricCriterion {
  id: Criterion;
  name: string;
  description: string;
  bands: Record<string, string>;
}

export interface Rubric {
  criteria: RubricCriterion[];
}

export interface RubricScore {
  rater_id: string;
  rater_kind: string;
  dataset_id: string;
  scores: Record<Criterion, number>;
  justification: string;
  created_at: string;
  calibration: boolean;
}

export interface TaskSummary {
  id: string;
  dataset_id: string;
  status: "pending" | "scored";
}

export interface Session {
  id: string;
  evaluator_id: string;
  mode: "calibration" | "formal";
  task_ids: string[];
  created_at: string;
  tasks: TaskSummary[];
}

export interface TaskPayload {
  id: string;
  dataset_id: string;
  status: "pending" | "scored";
  requirements_text: string;
  plantuml: string;
  render_graph: RenderGraph;
  rubric: Rubric;
  own_score?: RubricScore;
}

export interface TieBreak {
  id: string;
  dataset_id: string;
  judge_id: string;
  tied: string[];
  candidate_texts: Record<string, string>;
  status: "open" | "resolved";
  resolution: string[] | null;
  resolver_id: string | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
