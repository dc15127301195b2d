import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // tfjs holds wasm state per process; keep workers from thrashing memory
    pool: "forks",
    maxWorkers: 1,
    minWorkers: 1,
  },
});
