//! Binary labeling by sparsity: y in {-1, 1}^n becomes ||y - 1||_0 +
//! ||y + 1||_0 <= n. Small enough to check against every labeling.

use sparsemp::mpec::{adm_solve, SolverConfig};
use sparsemp::problems::generate_mrf;

fn main() -> sparsemp::Result<()> {
    let n = 12;
    for seed in 0..5 {
        let inst = generate_mrf(n, 0.3, seed)?;
        let res = adm_solve(&inst.problem, &SolverConfig::default())?;
        let labels = inst.decode(&res.x_final);

        let best = (0u32..1 << n)
            .map(|mask| {
                let l: Vec<u8> = (0..n).map(|i| (mask >> i & 1) as u8).collect();
                inst.energy(&l)
            })
            .fold(f64::INFINITY, f64::min);
        let shown: String = labels.iter().map(|l| char::from(b'0' + l)).collect();
        println!(
            "seed {seed}: {shown}  energy {:>9.5}  optimum {best:>9.5}",
            inst.energy(&labels)
        );
    }
    Ok(())
}
