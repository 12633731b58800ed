/** Domain error: anything the CLI reports as `error: …` with exit code 1. */
export class TrainerError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "TrainerError";
  }
}

/** Malformed interchange or config content, naming the offending location. */
export class SchemaError extends TrainerError {
  readonly line?: number;
  readonly field?: string;

  constructor(message: string, line?: number, field?: string) {
    const parts: string[] = [];
    if (line !== undefined) parts.push(`line ${line}`);
    if (field !== undefined) parts.push(`field '${field}'`);
    super(parts.length ? `${message} (${parts.join(", ")})` : message);
    this.name = "SchemaError";
    this.line = line;
    this.field = field;
  }
}
