// API payload types, mirroring the engine's canonical JSON schema.

export interface Artifact {
  id: string;
  type: string;
  name: string;
  body: string;
  summary?: string;
  provenance: "imported" | "generated" | "manual";
  flagged?: string;
  attributes: Record<string, string>;
  score?: number; // present on search rows
}

export type LinkStatus = "manual" | "pending" | "approved" | "rejected";

export interface TraceLink {
  childId: string;
  parentId: string;
  score?: number;
  explanation?: string;
  status: LinkStatus;
  createdBy: string;
  reviewedBy?: string;
  reviewedAt?: string;
}

export interface TimRelation {
  childType: string;
  parentType: string;
  linkCount: number;
}

export interface Tim {
  types: Record<string, number>;
  relations: TimRelation[];
}

export interface ViewSpec {
  rootId: string;
  ancestors: string[];
  descendants: string[];
  includedLinks: { childId: string; parentId: string }[];
}

export type FindingKind =
  | "cited-concept"
  | "predicted-concept"
  | "undefined-concept"
  | "contradiction"
  | "ambiguity"
  | "warning";

export interface HealthFinding {
  id: string;
  artifactId: string;
  kind: FindingKind;
  subject: string;
  explanation: string;
  state: "open" | "resolved" | "dismissed";
}

export interface Concept {
  term: string;
  definition: string;
  origin: "manual" | "extracted";
  artifactId: string;
}

export interface ChatResponse {
  text: string;
  citedArtifactIds: string[];
  usedK: number;
}

export interface JobEvent {
  timestamp: string;
  level: string;
  message: string;
}

export interface Job {
  id: string;
  projectId: string;
  kind: string;
  params: Record<string, unknown>;
  state: "created" | "running" | "completed" | "failed" | "cancelled";
  progress: number;
  events: JobEvent[];
  resultRef: Record<string, unknown> | null;
  error?: string;
}

export interface ProjectDoc {
  schema_version: number;
  project: { id: string; name: string; revision: number };
  artifacts: Artifact[];
  links: TraceLink[];
  concepts: Concept[];
  findings: HealthFinding[];
}

export interface ProjectListing {
  id: string;
  name: string;
  revision: number;
  artifactCount: number;
}
