//! Built-in scenarios, stored as configuration text.

use crate::error::{LabError, Result};

use super::config::ScenarioConfig;

pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "abelian_ramp",
        summary: "U(1) solenoid, flux ramped linearly from zero; loop outside the solenoid",
        text: "\
[scenario]
name = abelian_ramp
group = u1
quantize = true
[field]
kind = abelian_solenoid
flux_max = 1
solenoid_radius = 1
ramp = linear
[loop]
radius = 2
",
    },
    Builtin {
        name: "static_solenoid",
        summary: "U(1) solenoid with constant flux; the cancellation does not apply",
        text: "\
[scenario]
name = static_solenoid
group = u1
quantize = true
[field]
kind = abelian_solenoid
flux_max = 1
solenoid_radius = 1
ramp = constant
[loop]
radius = 2
",
    },
    Builtin {
        name: "su2_two_color",
        summary: "SU(2), uniform potentials on colors 1 and 2 with a smoothstep ramp",
        text: "\
[scenario]
name = su2_two_color
group = su2
[field]
kind = two_color
amplitudes = 0.5, 0.8
ramp = smoothstep
[loop]
radius = 1
",
    },
    Builtin {
        name: "su2_single_color",
        summary: "SU(2) solenoid embedded along T3 with a smoothstep ramp, resolution 1024",
        text: "\
[scenario]
name = su2_single_color
group = su2
[field]
kind = embedded_solenoid_single_color
color_direction = 0, 0, 1
ramp = smoothstep
[loop]
radius = 2
[resolution]
steps = 1024
grid_u = 1024
grid_v = 1024
",
    },
    Builtin {
        name: "su3_two_color",
        summary: "SU(3), uniform potentials on colors 1 and 2 with a smoothstep ramp",
        text: "\
[scenario]
name = su3_two_color
group = su3
[field]
kind = two_color
amplitudes = 0.5, 0.8
ramp = smoothstep
[loop]
radius = 1
",
    },
    Builtin {
        name: "pure_gauge",
        summary: "U(1) pure gauge A = grad(sin x cos y); every circulation vanishes",
        text: "\
[scenario]
name = pure_gauge
group = u1
[field]
kind = pure_gauge
gauge_function = sin_cos
gauge_scale = 1
[loop]
center = 0.4, 0.1, 0
radius = 1.3
",
    },
    Builtin {
        name: "zero_field",
        summary: "SU(2) with vanishing potential",
        text: "\
[scenario]
name = zero_field
group = su2
[field]
kind = embedded_solenoid_single_color
flux_max = 0
",
    },
];

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    let b = BUILTINS
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| LabError::invalid("scenario", format!("no built-in scenario named `{name}`")))?;
    ScenarioConfig::parse(b.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for b in BUILTINS {
            let c = builtin(b.name).unwrap();
            assert_eq!(c.name, b.name);
        }
        assert!(builtin("nope").is_err());
    }
}
