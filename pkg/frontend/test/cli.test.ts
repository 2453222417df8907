import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import { main } from "../src/cli";

const FIXTURES = path.join(__dirname, "..", "..", "test", "fixtures");
const CSV = path.join(FIXTURES, "reference.csv");
const JSON_DOC = path.join(FIXTURES, "reference_n12.json");

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "rcslab-figs-"));
}

test("renders a single kind from CSV", () => {
  const dir = tmpdir();
  const out = path.join(dir, "xeb.svg");
  assert.equal(main(["--kind", "xeb_vs_n", "--csv", CSV, "-o", out]), 0);
  assert.ok(fs.readFileSync(out, "utf8").startsWith("<svg"));
});

test("pt_overlay writes figure plus sidecar", () => {
  const dir = tmpdir();
  const out = path.join(dir, "pt.svg");
  assert.equal(main(["--kind", "pt_overlay", "--json", JSON_DOC, "-o", out]), 0);
  const sidecar = fs.readFileSync(out + ".deviations.txt", "utf8");
  assert.match(sidecar.split("\n")[0], /^max_binwise_deviation /);
});

test("--all renders every kind into a directory", () => {
  const dir = tmpdir();
  assert.equal(main(["--all", "--csv", CSV, "--json", JSON_DOC, "-o", dir]), 0);
  const names = fs.readdirSync(dir).sort();
  assert.deepEqual(names, [
    "pt_overlay.svg",
    "pt_overlay.svg.deviations.txt",
    "time_vs_m.svg",
    "top_states.svg",
    "xeb_vs_n.svg",
  ]);
});

test("usage errors return nonzero without throwing", () => {
  assert.equal(main(["--kind", "nope", "-o", "x.svg"]), 1);
  assert.equal(main(["--kind", "xeb_vs_n"]), 1);
  assert.equal(main(["--kind", "xeb_vs_n", "-o", "x.svg"]), 1); // no --csv
  assert.equal(main(["--unknown"]), 1);
});

test("missing input file is a clean error", () => {
  assert.equal(main(["--kind", "xeb_vs_n", "--csv", "/nonexistent.csv", "-o", "/tmp/x.svg"]), 1);
});
