/**
 * Request validation against the engine's published v1 JSON Schema
 * documents — the same files the Python side ships, loaded from the
 * repository (or $VIDEOREPAIR_SCHEMA_DIR) so both sides cannot drift.
 */

import { readFileSync, readdirSync } from "fs";
import { dirname, join, resolve } from "path";
import { fileURLToPath } from "url";

import { Ajv2020 } from "ajv/dist/2020.js";
import type { ValidateFunction } from "ajv";

function schemaDir(): string {
  const fromEnv = process.env.VIDEOREPAIR_SCHEMA_DIR;
  if (fromEnv) {
    return fromEnv;
  }
  const here = dirname(fileURLToPath(import.meta.url)); // dist/ (or src/ under vitest)
  return resolve(here, "..", "..", "src", "videorepair", "schemas", "v1");
}

const ajv = new Ajv2020({ strict: false });
const validators = new Map<string, ValidateFunction>();

for (const entry of readdirSync(schemaDir())) {
  if (!entry.endsWith(".json")) continue;
  const doc = JSON.parse(readFileSync(join(schemaDir(), entry), "utf-8"));
  ajv.addSchema(doc, entry);
}

export function validatorFor(name: string): ValidateFunction {
  let validator = validators.get(name);
  if (!validator) {
    const found = ajv.getSchema(`${name}.json`);
    if (!found) {
      throw new Error(`no schema named ${name}`);
    }
    validator = found;
    validators.set(name, validator);
  }
  return validator;
}

export function isValid(name: string, doc: unknown): boolean {
  return validatorFor(name)(doc) === true;
}

export function validationErrors(name: string, doc: unknown): string {
  const validator = validatorFor(name);
  if (validator(doc)) {
    return "";
  }
  return (validator.errors ?? [])
    .map((e) => `${e.instancePath || "/"} ${e.message ?? ""}`)
    .join("; ");
}
