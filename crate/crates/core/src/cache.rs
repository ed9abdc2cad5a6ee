//! Content-addressed result cache (filled in later in the build).
