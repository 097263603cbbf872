//! Named configurations used by the dichotomy checks and the end-to-end runs.

/// Small Gaussian below the lower mass threshold: stays dispersive.
pub const PRESET_A: &str = "\
# small Gaussian, mass below ||Q||^2/(1+eta)
nx = 128
ny = 128
L = 40
eta = 1
dt = 0.01
horizon = 10
lambda_cap = 1000
output_dir = preset-a
checkpoint_interval = 1
initial_data = gaussian
amplitude = 0.5
width = 1.5
e2_mode = zero
n_mode = zero
radial = true
";

/// Radial focusing data inside the mass window with negative Hamiltonian.
pub const PRESET_B: &str = "\
# radial, E2 = -i E1, n0 = -(|E1|^2+|E2|^2), H < 0, mass inside the window
nx = 256
ny = 256
L = 8
eta = 1
dt = 0.002
horizon = 5
lambda_cap = 44
output_dir = preset-b
checkpoint_interval = 0.05
initial_data = gaussian
amplitude = 1.1966620241321
width = 1
e2_mode = minus_i_e1
n_mode = minus_density
radial = true
";

/// The explicit self-similar family sampled at t = 0.
pub const PRESET_SELFSIMILAR: &str = "\
# explicit self-similar solution, limit profile, blow-up at T = 1
nx = 128
ny = 128
L = 1
eta = 1
dt = 0.0002
horizon = 0.4
lambda_cap = 1000
output_dir = preset-selfsimilar
checkpoint_interval = 0.05
initial_data = selfsimilar
omega = 20
T = 1
theta = 0
radial = true
";

pub const PRESETS: &[(&str, &str)] = &[
    ("a", PRESET_A),
    ("b", PRESET_B),
    ("selfsimilar", PRESET_SELFSIMILAR),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_config;

    #[test]
    fn presets_parse() {
        for (name, text) in PRESETS {
            parse_config(text).unwrap_or_else(|e| panic!("preset {name}: {e}"));
        }
    }
}
