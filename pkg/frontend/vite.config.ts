import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // The workbench talks only to the resolver service; proxy API calls to a
    // locally running `pointref serve` during development.
    proxy: { "/api": "http://127.0.0.1:8080" },
  },
  build: { outDir: "dist" },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
