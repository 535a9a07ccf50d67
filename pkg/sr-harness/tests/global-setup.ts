import { execSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

export default function setup() {
  const root = path.dirname(path.dirname(fileURLToPath(import.meta.url)));
  if (!fs.existsSync(path.join(root, "fixtures", ".complete"))) {
    execSync("python3 scripts/make_fixtures.py", { cwd: root, stdio: "inherit" });
  }
}
