// All user-facing text in one place. English-only for now; a future
// translation pass swaps this table out without touching the views.

export const STRINGS = {
  appName: "corpusforge",
  tagline: "Community translation workspace.",
  signIn: "Sign in",
  signOut: "Sign out",
  credentialPlaceholder: "personal credential",
  credentialMissing: "Enter the credential you were given.",
  serverUnreachable: "Could not reach the server.",
  navTranslate: "Translate",
  navReview: "Review",
  navDashboard: "Dashboard",

  claimButton: "Claim a sentence",
  noClaim: "No sentence claimed.",
  nothingToTranslate: "Nothing to translate right now.",
  claimFirst: "Claim a sentence first.",
  translatePlaceholder: "Hula translation…",
  translateHeading: "Translate",
  blankTranslation: "The translation text is empty.",
  reviewerGuidance: "Reviewer guidance:",
  submitTranslation: "Submit translation",
  record: "Record",
  stopRecording: "Stop",
  microphoneUnavailable: "Microphone unavailable; attach a file instead.",
  reclaimPrompt: "claim it again",
  availableSuffix: "available",
  revisionSuffix: "awaiting revision",

  reviewHeading: "Review queue",
  reviewEmpty: "Nothing waiting for review.",
  approve: "Approve",
  flag: "Flag",
  commentPlaceholder: "comment (required when flagging)",
  flagNeedsComment: "A flag needs a comment that guides the revision.",
  approved: "Approved.",
  flagged: "Flagged for revision.",
  reviewFailed: "Review failed.",
  earlierGuidance: "Earlier guidance:",
  queueUnavailable: "Could not load the queue.",

  dashboardHeading: "Dashboard",
  corpusHeading: "Corpus",
  batchesHeading: "Batches",
  leaderboardHeading: "Leaderboard",
  prizePoolHeading: "Prize pool",
  noBatches: "No batches imported yet.",
  noApprovals: "No approvals yet.",
  dashboardUnavailable: "Could not load the dashboard.",
  retry: "retry",

  unexpectedError: "Unexpected error.",
} as const;
