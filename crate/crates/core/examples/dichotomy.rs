//! Classify the two dichotomy presets and integrate them: preset A disperses,
//! preset B focuses until its energy norm passes the cap. These runs are
//! empirical consistency checks, not proofs.
//!
//! Pass `a` or `b` to run only one preset; output goes to a temporary directory.

use mzk::cli::{parse_config, preset, simulate_config};

fn main() -> mzk::Result<()> {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let names = if names.is_empty() { vec!["a".into(), "b".into()] } else { names };
    let root = std::env::temp_dir().join("mzk-dichotomy");
    for name in names {
        let text = preset(&name).ok_or_else(|| mzk::MzkError::Contract(format!("unknown preset {name}")))?;
        let cfg = parse_config(text)?;
        let s = simulate_config(&cfg, &root.join(&name))?;
        println!("preset {name}: {}", s.classification.note);
        println!(
            "  mass {:.6}, H {:.6}, stop {:?} at t = {:.4} after {} steps",
            s.classification.mass, s.classification.hamiltonian, s.stop_reason, s.t_final, s.steps
        );
        println!(
            "  lambda {:.4} -> max {:.4} ({:.2}x)",
            s.initial_lambda,
            s.max_lambda,
            s.max_lambda / s.initial_lambda
        );
    }
    println!("(empirical consistency checks, not proofs)");
    Ok(())
}
