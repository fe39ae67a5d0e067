//! The acceptance table: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p so3five --test acceptance -- --nocapture` to see
//! the table.

use std::time::Instant;

use so3five::validation::{acceptance, Config};

#[test]
fn acceptance_table() {
    let start = Instant::now();
    let table = acceptance(&Config::default());
    for c in &table {
        println!("{}", c.summary());
    }
    println!("acceptance suite finished in {:.1} s", start.elapsed().as_secs_f64());
    let failed: Vec<u32> = table.iter().filter(|c| !c.pass()).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failing criteria: {:?}", failed);
}
