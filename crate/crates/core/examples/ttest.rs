//! Paired one-sided t-test on per-fold F1 scores.
//!
//! ```text
//! cargo run --example ttest
//! ```

use sdprelex::harness::paired_t_test;

fn main() -> sdprelex::Result<()> {
    let ours = [92.4, 93.1, 92.9, 92.6, 93.0];
    let baseline = [91.8, 92.0, 92.1, 91.9, 92.3];
    let r = paired_t_test(&ours, &baseline)?;
    println!("t = {:.4}, df = {}, one-sided p = {:.6}", r.t, r.df, r.p);

    match paired_t_test(&[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0]) {
        Ok(_) => unreachable!(),
        Err(e) => println!("constant differences: {}", e),
    }
    Ok(())
}
