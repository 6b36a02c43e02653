//! Relative risk from 2x2 counts, the nested-count test and its power bound.

use rare_rules::stats::{count_test, power_bound, power_statistic, relative_risk, Smoothing};

fn main() -> rare_rules::Result<()> {
    // matched: 30 positive of 80; unmatched: 20 positive of 920
    let rr = relative_risk(80, 30, 50, 1000, Smoothing::None)?;
    println!("RR = {rr:.3}");

    // no unmatched positives
    let rr = relative_risk(80, 50, 50, 1000, Smoothing::None)?;
    let smoothed = relative_risk(80, 50, 50, 1000, Smoothing::Haldane)?;
    println!("RR = {rr}, with Haldane smoothing {smoothed:.2}");

    for (small, large) in [(7, 7), (10, 8), (10, 7)] {
        let d = count_test(small, large, 3)?;
        println!("counts ({small}, {large}), k=3: reject={} diff={}", d.reject, d.diff_count);
    }

    let u = power_statistic(100, 0.20, 0.15, 3, 0.25)?;
    let bound = power_bound(100, 0.20, 0.15, 3, 0.25)?;
    println!("u_n = {u:.6}, power >= {bound:.12}");
    Ok(())
}
