import assert from "node:assert/strict";
import { execFileSync, spawnSync } from "node:child_process";
import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { PNG_SIGNATURE } from "../src/png.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const CLI = path.join(here, "..", "src", "cli.js");

const CSV = [
  "ensemble,N,mean_abs_error,std_abs_error,bootstrap_size,seed",
  "haar,100,0.2946,0.0367,1000,99",
  "haar,1000,0.0932,0.0116,1000,99",
  "haar,10000,0.0250,0.0034,1000,99",
  "four_angle,100,0.2989,0.0355,1000,99",
  "four_angle,1000,0.0838,0.0112,1000,99",
  "four_angle,10000,0.0282,0.0037,1000,99",
  "two_angle,100,0.2686,0.0352,1000,99",
  "two_angle,1000,0.0996,0.0130,1000,99",
  "two_angle,10000,0.0310,0.0038,1000,99",
].join("\n") + "\n";

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "plot-bench-"));
}

function runCli(args: string[]): { status: number; stderr: string } {
  const res = spawnSync(process.execPath, [CLI, ...args], { encoding: "utf-8" });
  return { status: res.status ?? -1, stderr: res.stderr };
}

test("renders a PNG from a valid CSV and exits 0", () => {
  const dir = tmpdir();
  const csv = path.join(dir, "bench.csv");
  const out = path.join(dir, "figure.png");
  fs.writeFileSync(csv, CSV);
  const res = runCli([csv, out]);
  assert.equal(res.status, 0, res.stderr);
  const png = fs.readFileSync(out);
  assert.deepEqual(png.subarray(0, 8), Buffer.from(PNG_SIGNATURE));
  assert.ok(png.length > 2000);
});

test("does not mutate the input CSV", () => {
  const dir = tmpdir();
  const csv = path.join(dir, "bench.csv");
  const out = path.join(dir, "figure.png");
  fs.writeFileSync(csv, CSV);
  const before = crypto.createHash("sha256").update(fs.readFileSync(csv)).digest("hex");
  runCli([csv, out]);
  const after = crypto.createHash("sha256").update(fs.readFileSync(csv)).digest("hex");
  assert.equal(before, after);
});

test("output is regenerated deterministically", () => {
  const dir = tmpdir();
  const csv = path.join(dir, "bench.csv");
  fs.writeFileSync(csv, CSV);
  const out1 = path.join(dir, "a.png");
  const out2 = path.join(dir, "b.png");
  assert.equal(runCli([csv, out1]).status, 0);
  assert.equal(runCli([csv, out2]).status, 0);
  assert.deepEqual(fs.readFileSync(out1), fs.readFileSync(out2));
});

test("corrupt CSV exits nonzero and writes no file", () => {
  const dir = tmpdir();
  const csv = path.join(dir, "bad.csv");
  const out = path.join(dir, "figure.png");
  fs.writeFileSync(csv, "ensemble,N\nhaar,100\n");
  const res = runCli([csv, out]);
  assert.notEqual(res.status, 0);
  assert.match(res.stderr, /missing column/);
  assert.ok(!fs.existsSync(out));
});

test("empty CSV exits nonzero and writes no file", () => {
  const dir = tmpdir();
  const csv = path.join(dir, "empty.csv");
  const out = path.join(dir, "figure.png");
  fs.writeFileSync(csv, "");
  const res = runCli([csv, out]);
  assert.notEqual(res.status, 0);
  assert.ok(!fs.existsSync(out));
});

test("missing input exits nonzero", () => {
  const dir = tmpdir();
  const res = runCli([path.join(dir, "nothing.csv"), path.join(dir, "x.png")]);
  assert.notEqual(res.status, 0);
});

test("wrong usage exits 2", () => {
  const res = runCli([]);
  assert.equal(res.status, 2);
});

test("log-y flag is accepted", () => {
  const dir = tmpdir();
  const csv = path.join(dir, "bench.csv");
  const out = path.join(dir, "figure.png");
  fs.writeFileSync(csv, CSV);
  assert.equal(runCli([csv, out, "--log-y"]).status, 0);
  assert.ok(fs.existsSync(out));
});

test("renders the repository bench_results.csv when present", () => {
  const repoCsv = path.join(here, "..", "..", "..", "bench_results.csv");
  if (!fs.existsSync(repoCsv)) {
    return; // the acceptance experiment has not been run in this checkout
  }
  const dir = tmpdir();
  const out = path.join(dir, "bench.png");
  const res = runCli([repoCsv, out]);
  assert.equal(res.status, 0, res.stderr);
  assert.ok(fs.existsSync(out));
});
