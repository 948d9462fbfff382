import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node",
    // Integration tests drive the Python pipeline end to end.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
