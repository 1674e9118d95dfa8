//! Built-in scenarios. Names are part of the interface and never change.

use crate::config::RunType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub run: RunType,
    pub description: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "sds-baseline",
        run: RunType::Evolve,
        description: "Schwarzschild-de Sitter (M0 = 1, Lambda = 0.06): l = 1 source in the core, modes m = 0, 1",
        text: "\
schema_version = 1
run = evolve
M0 = 1
Lambda = 0.06
a = 0
n_r = 61
n_theta = 16
t_end = 250
cadence = 0.25
modes = 0, 1
source_l = 1
source_t0 = 0
source_t1 = 4
write_fields = final
output_dir = out/sds-baseline
",
    },
    Preset {
        name: "slow-kerr",
        run: RunType::Crosscheck,
        description: "a = 0.02: time-domain decay rate against the l = 1 fundamental resonance",
        text: "\
schema_version = 1
run = crosscheck
M0 = 1
Lambda = 0.06
a = 0.02
n_r = 61
n_theta = 16
t_end = 250
cadence = 0.25
modes = 0
source_l = 1
source_t0 = 0
source_t1 = 4
qnm_guess_re = 0.19
qnm_guess_im = -0.07
output_dir = out/slow-kerr
",
    },
    Preset {
        name: "minkowski-check",
        run: RunType::Convergence,
        description: "flat periodic box: second-order self-convergence of a Gaussian pulse",
        text: "\
schema_version = 1
run = convergence
resolutions = 64, 128, 256
convergence_order = 2
convergence_tol = 0.3
output_dir = out/minkowski-check
",
    },
    Preset {
        name: "dirichlet-horizon",
        run: RunType::EvolveDirichlet,
        description: "near-horizon solve on M_delta minus K_2delta with Dirichlet data on the core boundary",
        text: "\
schema_version = 1
run = evolve-dirichlet
M0 = 1
Lambda = 0.06
a = 0
n_r = 64
n_theta = 16
t_end = 60
cadence = 0.25
modes = 0
source_l = 0
source_t0 = 0
source_t1 = 1
source_r0 = 5.49
source_r1 = 5.62
source_support = general
output_dir = out/dirichlet-horizon
",
    },
    Preset {
        name: "gap-scan-default",
        run: RunType::GapScan,
        description: "argument-principle scan of [-1, 1] x [-0.5, 0.1] for Schwarzschild-de Sitter",
        text: "\
schema_version = 1
run = gap-scan
M0 = 1
Lambda = 0.06
a = 0
scan_re_min = -1
scan_re_max = 1
scan_im_min = -0.5
scan_im_max = 0.1
scan_l_max = 3
scan_m_max = 3
output_dir = out/gap-scan-default
",
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
