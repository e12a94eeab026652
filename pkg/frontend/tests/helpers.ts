import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { ReasonRequest, ReasonResponse } from "../src/types";

/** Shape of a recorded request/response pair under tests/fixtures/. */
export interface Fixture<T> {
  name: string;
  request: { method: string; path: string; body: unknown };
  status: number;
  response: T;
}

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture<T>(name: string): Fixture<T> {
  const raw = readFileSync(join(here, "fixtures", `${name}.json`), "utf8");
  return JSON.parse(raw) as Fixture<T>;
}

export function loadReason(name: string): Fixture<ReasonResponse> {
  return loadFixture<ReasonResponse>(name);
}

export function reasonRequestOf(fixture: Fixture<ReasonResponse>): ReasonRequest {
  return fixture.request.body as ReasonRequest;
}
