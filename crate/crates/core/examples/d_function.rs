//! Sideband amplitudes from the exact d-function row against their Bessel limit.
//!
//! Run with `cargo run --example d_function -- [m] [S]`.

use scw_qkd::wigner::{beta_from_modulation, bessel_j, d_row, SidebandCount};

fn main() -> scw_qkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: f64 = args.next().map_or(0.319, |a| a.parse().expect("m must be a number"));
    let s: u32 = args.next().map_or(1024, |a| a.parse().expect("S must be an integer"));

    let sidebands = SidebandCount::new(s)?;
    let beta = beta_from_modulation(m, sidebands)?;
    let row = d_row(sidebands, beta)?;

    println!("m = {m}, S = {s}, beta = {beta:.6e}");
    println!("{:>4} {:>22} {:>22} {:>10}", "k", "d_0k(beta)", "J_-k(m)", "diff");
    for k in -4i64..=4 {
        let exact = row.get(k);
        let limit = bessel_j(-k as i32, m)?;
        println!("{k:>4} {exact:>22.15e} {limit:>22.15e} {:>10.2e}", exact - limit);
    }
    println!("sum of squares over all {} modes: {:.15}", sidebands.modes(), row.sum_of_squares());
    Ok(())
}
