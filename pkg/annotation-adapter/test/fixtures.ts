/** The five annotation-fixture sentences used across the suite. */
export const FIXTURE_SENTENCES: readonly string[] = [
  "Millions of Americans lost their unemployment benefits.",
  "Saddam Hussein poses a threat.",
  "Americans go.",
  "Americans change.",
  "Today, Americans should not lose their unemployment benefits.",
];
