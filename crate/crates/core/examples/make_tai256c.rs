//! Writes the 16x16 grey-pattern instance (tai256c) in QAPLIB format.
//!
//! Usage: `cargo run --example make_tai256c -- data/tai256c.dat`

use symbb_core::instance::{grey_pattern, write_qaplib};

fn main() -> symbb_core::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "tai256c.dat".to_string());
    let qap = grey_pattern(16, 16, 92)?;
    std::fs::write(&path, write_qaplib(&qap))?;
    eprintln!("wrote {path}");
    Ok(())
}
