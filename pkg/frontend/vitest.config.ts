import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the round-trip suite spawns the Python service and waits on real ticks
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
