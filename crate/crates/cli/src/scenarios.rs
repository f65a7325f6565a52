//! Bundled reproduction scenarios. Each is a partial run config that a
//! user config or the command line may override.

use serde_json::{json, Value};

pub const NAMES: [&str; 5] = [
    "maxwellian-stable",
    "bump-unstable",
    "thin-spray-sweep",
    "scalar-coupling",
    "system-prop1",
];

fn maxwellian() -> Value {
    json!({"kind": "maxwellian", "mass": 1.0, "drift": 0.0, "width": 1.0})
}

pub fn get(name: &str) -> Option<Value> {
    let v = match name {
        // both acoustic roots sit just below the axis
        "maxwellian-stable" => json!({
            "command": "roots",
            "profile": maxwellian(),
            "params": {"c0": 1.0, "rho0": 1.0, "kappa": 0.01},
            "region": {"re_min": -3.0, "re_max": 3.0, "im_min": -0.2, "im_max": 0.2},
        }),
        // sound speed placed on the rising flank of the bump
        "bump-unstable" => json!({
            "command": "roots",
            "profile": {
                "kind": "bump_on_tail", "eps": 0.05, "eta": 0.5, "c_star": 5.0,
                "base": maxwellian(),
            },
            "params": {"c0": 5.0, "rho0": 1.0, "kappa": 0.003},
            "region": {"re_min": -15.0, "re_max": 15.0, "im_min": 0.0005, "im_max": 0.25},
            "sim": {"t_final": 15.0},
            "mode": {"k": 8.0, "initial": {"kind": "most_unstable"}},
            "illposed": {"s": 1.0, "n_exponent": 2.0, "k_list": [8.0, 16.0, 32.0]},
        }),
        "thin-spray-sweep" => json!({
            "command": "thin-spray",
            "profile": maxwellian(),
            "params": {"c0": 1.0, "rho0": 1.0, "kappa": 0.002},
            "kappa_sweep": (1..=16).map(|i| 5e-4 * i as f64).collect::<Vec<_>>(),
        }),
        // one-dimensional system with phi(v) = v
        "scalar-coupling" => json!({
            "command": "stability-check",
            "profile": maxwellian(),
            "system": {"A": [1.0], "grad_psi": [1.0], "phi_coeffs": [[0.0, 1.0]], "kappa": 0.001},
        }),
        "system-prop1" => json!({
            "command": "stability-check",
            "profile": maxwellian(),
            "system": {
                "A": [-1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 1.5],
                "grad_psi": [1.0, -1.0, 0.5],
                "phi_coeffs": [[1.0], [0.0, 1.0], [0.2, 0.0, 0.3]],
                "kappa": 0.0001,
            },
        }),
        _ => return None,
    };
    Some(v)
}
