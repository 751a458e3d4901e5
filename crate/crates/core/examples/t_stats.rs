//! One-sample t statistics and 95% intervals for a set of error samples.

use trajmap::evaluator::{t_critical, t_interval, t_statistics};

fn main() -> trajmap::Result<()> {
    let samples = [4.1, 5.3, 3.8, 6.0, 4.7, 5.1, 4.4, 5.9, 4.0, 5.2];
    let s = t_statistics(&samples)?;
    println!(
        "n {}: mean {:.3}, std {:.3}, stderr {:.3}, 95% CI [{:.3}, {:.3}]",
        s.n, s.mean, s.std_dev, s.std_error, s.ci_low, s.ci_high
    );

    // the same interval from summary values alone
    let t = t_interval(30, 21.32, 3.08)?;
    println!(
        "n 30, mean 21.32, std 3.08: stderr {:.3}, CI [{:.2}, {:.2}]",
        t.std_error, t.ci_low, t.ci_high
    );
    for df in [2, 9, 29, 120] {
        println!("t(0.975, {df}) = {:.4}", t_critical(df));
    }
    Ok(())
}
