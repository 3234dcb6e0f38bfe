// Wire types of the facilitation service. These mirror the JSON the service
// emits; the client never invents numbers of its own.

export interface ExpertInfo {
  id: string;
  competence: number;
  name: string;
}

export interface JudgmentRecord {
  expert: string;
  i: number;
  j: number;
  grade: number;
  scale_grades: number;
}

export interface SessionConfig {
  epsilon: number;
  threshold: number;
  cap: number;
  mean: string;
  scale_grades: number[];
  [extra: string]: unknown;
}

export interface SessionResults {
  w: number[];
  K: number[];
  status: string;
}

export interface SessionDoc {
  version: number;
  id: string;
  token: string;
  alternatives: string[];
  experts: ExpertInfo[];
  config: SessionConfig;
  judgments: JudgmentRecord[];
  results: SessionResults | null;
  status: string;
  round: number;
  open_request: RevisionRequest | null;
  events: unknown[];
}

export interface Completeness {
  connected: Record<string, boolean>;
  union_connected: boolean;
  components: number[][];
  suggested_edges: [number, number][];
}

export interface SpectrumTable {
  coordinate: number;
  grades: number;
  rows: [number, number][];
}

export interface AgreementPayload {
  status: string;
  session_status: string;
  round: number;
  completeness: Completeness;
  K?: number[];
  threshold?: number;
  passing?: boolean;
  worst_coordinate?: number;
  w?: number[];
  tree_count?: number;
  replica_count?: number;
  spectrums?: SpectrumTable[];
}

export interface RevisionRequest {
  request_id: string;
  expert: string;
  i: number;
  j: number;
  current_value: number;
  suggested_value: number;
  coordinate: number;
  round: number;
  state_version: number;
}

export interface RevisionEnvelope {
  request: RevisionRequest | null;
  version: number;
  status: string;
}

export interface JudgmentSubmission {
  expert: string;
  i: number;
  j: number;
  grade: number;
  scale_grades: number;
  direction: ">" | "<";
}

export type RevisionAction = "accept" | "value" | "decline";
