//! C ABI surface. Filled in once the core crate stabilizes.
