import * as fs from "node:fs";

import { TrainerError } from "./errors";

/** The native separator token; always id 0. */
export const SEP_TOKEN = "[SEP]";

const TOKEN_RE = /\[sep\]|[a-z0-9]+/g;

function tokenize(text: string): string[] {
  const out: string[] = [];
  for (const match of text.toLowerCase().matchAll(TOKEN_RE)) {
    out.push(match[0] === "[sep]" ? SEP_TOKEN : match[0]);
  }
  return out;
}

/**
 * Frequency vocabulary over whitespace/punctuation-split lowercase tokens.
 * Ids are stable: SEP_TOKEN is 0; the rest rank by (count desc, token asc).
 * Unknown tokens are skipped at encode time; sequences longer than maxLen
 * are truncated at the tail (the end is dropped).
 */
export class Tokenizer {
  readonly maxLen: number;
  private readonly ids: Map<string, number>;
  private readonly tokens: string[];

  private constructor(tokens: string[], maxLen: number) {
    this.tokens = tokens;
    this.maxLen = maxLen;
    this.ids = new Map(tokens.map((token, id) => [token, id]));
  }

  static fit(texts: string[], vocabSize: number, maxLen: number): Tokenizer {
    if (vocabSize < 2) throw new TrainerError(`vocab_size must be >= 2, got ${vocabSize}`);
    const counts = new Map<string, number>();
    for (const text of texts) {
      for (const token of tokenize(text)) {
        if (token === SEP_TOKEN) continue;
        counts.set(token, (counts.get(token) ?? 0) + 1);
      }
    }
    const ranked = [...counts.entries()]
      .sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1))
      .slice(0, vocabSize - 1)
      .map(([token]) => token);
    return new Tokenizer([SEP_TOKEN, ...ranked], maxLen);
  }

  get vocabSize(): number {
    return this.tokens.length;
  }

  encode(text: string): number[] {
    const out: number[] = [];
    for (const token of tokenize(text)) {
      const id = this.ids.get(token);
      if (id !== undefined) out.push(id);
      if (out.length === this.maxLen) break;
    }
    return out;
  }

  save(path: string): void {
    fs.writeFileSync(path, JSON.stringify({ max_len: this.maxLen, tokens: this.tokens }));
  }

  static load(path: string): Tokenizer {
    let parsed: { max_len: number; tokens: string[] };
    try {
      parsed = JSON.parse(fs.readFileSync(path, "utf-8"));
    } catch (err) {
      throw new TrainerError(`cannot read vocabulary ${path}: ${(err as Error).message}`);
    }
    if (!Array.isArray(parsed.tokens) || parsed.tokens[0] !== SEP_TOKEN) {
      throw new TrainerError(`corrupt vocabulary file ${path}`);
    }
    return new Tokenizer(parsed.tokens, parsed.max_len);
  }
}
