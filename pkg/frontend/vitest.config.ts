import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // every render shells out to the core, which imports numpy/numba
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
