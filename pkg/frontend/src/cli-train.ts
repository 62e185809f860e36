#!/usr/bin/env node
/**
 * Regenerate the checked-in fixture models (seeded; the committed files
 * remain authoritative).  Invoked via `npm run train-fixtures`.
 */

import * as fs from "fs";
import * as path from "path";

import { renderModel } from "./modelFormat";
import { buildFixtureSet } from "./trainFixtures";

async function main(): Promise<number> {
  const outDir = path.resolve(__dirname, "..", "fixtures");
  fs.mkdirSync(outDir, { recursive: true });
  const fixtures = await buildFixtureSet();
  for (const fixture of fixtures) {
    const target = path.join(outDir, fixture.file);
    fs.writeFileSync(target, renderModel(fixture.model), "utf8");
    console.log(`wrote ${target}`);
  }
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(`error: ${err instanceof Error ? err.stack : err}`);
    process.exit(1);
  }
);
