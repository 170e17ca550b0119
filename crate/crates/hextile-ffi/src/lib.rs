//! C ABI surface for the hextile library. Placeholder until the core
//! crate's public API settles.
