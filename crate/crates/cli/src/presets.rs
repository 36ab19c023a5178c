//! Built-in named experiment configurations.
//!
//! Each preset is a complete TOML config; a user file given alongside a
//! preset overrides individual keys.

use mhfem::error::{Error, Result};

pub const PRESET_NAMES: [&str; 8] = [
    "test1",
    "test2",
    "humped",
    "decreasing",
    "sharply_decreasing",
    "disk_highbias",
    "disk_nobias",
    "shrink",
];

pub fn preset_toml(name: &str) -> Result<&'static str> {
    Ok(match name {
        // Shifted square habitat, conformal, Gaussian seed: convergence
        // test cases 1 and 2.
        "test1" => {
            r#"
scenario = "rect_shift"
[mesh]
conformity = "conformal"
grading = 1.3
outer = [-17.0, 19.0, -17.0, 27.0]
inner = [3.0, 7.0, 3.0, 7.0]
n_inner = 40
n_outer = 17
[model]
d0 = 1.0
d1 = 2.0
r = 1.2
a = 0.8
m = 1.0
alpha = 0.5
c = [1.0, 0.0]
[stepper]
tau = 0.1
tol_steady = 1e-5
max_steps = 20000
[initial]
amplitude = 6.366197723675814
sigma = 0.5
center = [5.0, 5.0]
[output]
dir = "out/test1"
"#
        }
        "test2" => {
            r#"
scenario = "rect_shift"
[mesh]
conformity = "conformal"
grading = 1.3
outer = [-17.0, 19.0, -17.0, 27.0]
inner = [3.0, 7.0, 3.0, 7.0]
n_inner = 40
n_outer = 17
[model]
d0 = 1.0
d1 = 2.0
r = 1.2
a = 0.8
m = 1.0
alpha = 0.7
c = [1.0, 0.0]
[stepper]
tau = 0.1
tol_steady = 1e-5
max_steps = 20000
[initial]
amplitude = 6.366197723675814
sigma = 0.5
center = [5.0, 5.0]
[output]
dir = "out/test2"
"#
        }
        // Strip validation cases; robin_b is derived from beta/d2/m2.
        "humped" => {
            r#"
scenario = "strip_validation"
[mesh]
conformity = "nonconformal"
grading = 1.2
l_habitat = 5.0
l_tail = 20.0
nx_habitat = 99
nx_tail = 59
ny = 9
[model]
d0 = 1.0
d1 = 1.0
r = 1.0
a = 1.0
m = 1.0
alpha = 0.3
c = [1.0, 0.0]
beta = 0.3
d2 = 1.0
m2 = 1.0
[stepper]
tau = 0.05
tol_steady = 1e-5
max_steps = 200000
[oracle]
h0 = 2.5e-3
tau = 2.5e-2
[output]
dir = "out/humped"
"#
        }
        "decreasing" => {
            r#"
scenario = "strip_validation"
[mesh]
conformity = "nonconformal"
grading = 1.2
l_habitat = 5.0
l_tail = 20.0
nx_habitat = 99
nx_tail = 59
ny = 9
[model]
d0 = 1.0
d1 = 1.0
r = 1.0
a = 1.0
m = 1.0
alpha = 0.8
c = [1.5, 0.0]
beta = 0.5
d2 = 1.0
m2 = 0.5
[stepper]
tau = 0.05
tol_steady = 1e-5
max_steps = 200000
[oracle]
h0 = 2.5e-3
tau = 2.5e-2
[output]
dir = "out/decreasing"
"#
        }
        "sharply_decreasing" => {
            r#"
scenario = "strip_validation"
[mesh]
conformity = "nonconformal"
grading = 1.3
l_habitat = 5.0
l_tail = 250.0
nx_habitat = 99
nx_tail = 59
ny = 9
[model]
d0 = 1.0
d1 = 2.0
r = 1.0
a = 1.0
m = 0.1
alpha = 0.8
c = [2.5, 0.0]
beta = 0.6
d2 = 1.3
m2 = 1.4
[stepper]
tau = 0.05
tol_steady = 1e-6
max_steps = 400000
[oracle]
h0 = 3.125e-4
tau = 2.5e-3
[output]
dir = "out/sharply_decreasing"
"#
        }
        // Shifted disk habitat with strong crowding.
        "disk_highbias" => {
            r#"
scenario = "disk_shift"
[mesh]
grading = 1.3
r_inner = 1.4142135623730951
r_outer = 10.0
n_gamma = 128
n_outer = 64
[model]
d0 = 1.0
d1 = 2.0
r = 1.2
a = 8.0
m = 1.0
alpha = 0.7
c = [1.0, 0.0]
[stepper]
tau = 0.025
tol_steady = 1e-5
max_steps = 40000
[initial]
amplitude = 12.732395447351626
sigma = 0.5
center = [0.0, 0.0]
[output]
dir = "out/disk_highbias"
"#
        }
        "disk_nobias" => {
            r#"
scenario = "disk_shift"
[mesh]
grading = 1.3
r_inner = 1.4142135623730951
r_outer = 10.0
n_gamma = 128
n_outer = 64
[model]
d0 = 1.0
d1 = 2.0
r = 1.2
a = 8.0
m = 1.0
alpha = 0.5
c = [1.0, 0.0]
[stepper]
tau = 0.025
tol_steady = 1e-5
max_steps = 40000
[initial]
amplitude = 12.732395447351626
sigma = 0.5
center = [0.0, 0.0]
[output]
dir = "out/disk_nobias"
"#
        }
        // Habitat shrinking in height while shifting: transient decline.
        "shrink" => {
            r#"
scenario = "shrinking_rect"
[mesh]
conformity = "conformal"
grading = 1.3
outer = [-16.0, 16.0, -6.0, 16.0]
inner = [-4.0, 4.0, 0.0, 10.0]
n_inner = 16
n_outer = 9
[model]
d0 = 1.0
d1 = 2.0
r = 1.0
a = 1.0
m = 0.5
alpha = 0.3
c = [0.5, 0.1]
[stepper]
tau = 0.1
tol_steady = 1e-12
max_steps = 2000
t_final = 90.0
[initial]
amplitude = 6.366197723675814
sigma = 0.5
center = [0.0, 5.0]
[output]
dir = "out/shrink"
"#
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset \"{other}\"; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}
