// Payload shapes served by the harness API. The dashboard displays these
// verbatim; it never recomputes analysis results client-side.

export interface CheckerSummary {
  backup?: number;
  status: string;
  duration?: number;
  output?: string;
  error?: string;
}

export interface LoopStatus {
  last_backup_number: number;
  last_checker_result: CheckerSummary | null;
  last_injection_at: string | null;
  paused: boolean;
  admit_count: number;
  recadmit_count: number;
  total_items: number;
  pending_overrides: number;
}

export interface DepEntry {
  name: string;
  kind: string;
}

export interface DepsRecord {
  name: string;
  kind: string;
  lines: number;
  admit: boolean;
  recadmit: boolean;
  deps: DepEntry[];
  line: string;
}

export interface DepsPayload {
  backup_number: number;
  records: DepsRecord[];
}

export interface SectionRow {
  section: number;
  level: string;
  stated: number;
  proved: number;
  total: number;
}

export interface SectionsPayload {
  sections: SectionRow[];
}

export interface BottleneckRow {
  name: string;
  blocked_count: number;
}

export interface BottlenecksPayload {
  rows: BottleneckRow[];
}

export interface GrowthRow {
  number: number;
  lines: number;
}

export interface GrowthPayload {
  stride: number;
  rows: GrowthRow[];
}
