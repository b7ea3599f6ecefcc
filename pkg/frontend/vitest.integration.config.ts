import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/integration/**/*.test.ts"],
    globalSetup: ["tests/integration/engine-setup.ts"],
    testTimeout: 30000,
    hookTimeout: 120000,
  },
});
