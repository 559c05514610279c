//! Published shifted energies for the hydrogen-like Z = 118 ion, point
//! nucleus, 600 nodes, node intensity `1e-4`, used as regression anchors.

/// Nuclear charge of every reference configuration.
pub const CHARGE: u32 = 118;

/// Mass number used to size the extended nucleus.
pub const MASS_NUMBER: f64 = 294.0;

/// Exact levels 1..=15 for kappa = -2.
pub const KAPPA_MINUS2_EXACT: [f64; 15] = [
    -1829.630750908,
    -826.7683539069,
    -463.1183252634,
    -294.4509801141,
    -203.2419549027,
    -148.5534402360,
    -113.2479180697,
    -89.15794547564,
    -71.99846504808,
    -59.34862423729,
    -49.75800915710,
    -42.31511730902,
    -36.42398370073,
    -31.68173025393,
    -27.80813459180,
];

/// Exact levels 1..=14 for kappa = +2 (its ladder starts at `n_r = 2`).
pub const KAPPA_PLUS2_EXACT: [f64; 14] = [
    -826.7683539068,
    -463.1183252633,
    -294.4509801141,
    -203.2419549026,
    -148.5534402360,
    -113.2479180697,
    -89.15794547563,
    -71.99846504808,
    -59.34862423728,
    -49.75800915710,
    -42.31511730902,
    -36.42398370072,
    -31.68173025392,
    -27.80813459179,
];

/// Usual (Galerkin) FEM, kappa = -2, genuine levels 1..=15.
pub const KAPPA_MINUS2_GALERKIN: [f64; 15] = [
    -1829.630750908,
    -826.7683699234,
    -463.1183759679,
    -294.4510822666,
    -203.2421234746,
    -148.5536893591,
    -113.2482614926,
    -89.15839677745,
    -71.99903774457,
    -59.34933184120,
    -49.75886521413,
    -42.31613542297,
    -36.42517755182,
    -31.68311361412,
    -27.80972133834,
];

/// Spurious Galerkin values for kappa = -2, each lying just below the
/// genuine level given next to it.
pub const KAPPA_MINUS2_GALERKIN_SPURIOUS: [(f64, u32); 4] = [
    (-294.6216782193, 4),
    (-113.4611501523, 7),
    (-59.57649074983, 10),
    (-36.65876644972, 13),
];

/// Galerkin value for kappa = +2 that coincides with the kappa = -2 ground state.
pub const KAPPA_PLUS2_COINCIDENCE: f64 = -1829.630750908;

/// Instilled spurious Galerkin values for kappa = +2.
pub const KAPPA_PLUS2_GALERKIN_SPURIOUS: [f64; 4] = [
    -294.6216782190,
    -113.4611501522,
    -59.57649074972,
    -36.65876644981,
];

/// Stabilised FEM, kappa = -2, levels 1..=15.
pub const KAPPA_MINUS2_SUPG: [f64; 15] = [
    -1829.630678009,
    -826.7681327991,
    -463.1178925700,
    -294.4502765309,
    -203.2409198509,
    -148.5520121218,
    -113.2460345755,
    -89.15554369439,
    -71.99548153219,
    -59.34499500331,
    -49.75366967052,
    -42.31000245862,
    -36.41802776855,
    -31.67486688495,
    -27.80029676250,
];

/// Stabilised FEM, kappa = +2, levels 1..=14.
pub const KAPPA_PLUS2_SUPG: [f64; 14] = [
    -826.7682977877,
    -463.1181147468,
    -294.4505263188,
    -203.2411849302,
    -148.5522865624,
    -113.2463152035,
    -89.15582867204,
    -71.99576972929,
    -59.34528569217,
    -49.75396236511,
    -42.31029682491,
    -36.41832357217,
    -31.67516395745,
    -27.80059498195,
];

/// Relative errors of the stabilised FEM, kappa = -2, levels 1..=15.
pub const KAPPA_MINUS2_SUPG_RELATIVE_ERRORS: [f64; 15] = [
    0.0000000398,
    0.0000002674,
    0.0000009343,
    0.0000023894,
    0.0000050927,
    0.0000096134,
    0.0000166316,
    0.0000269384,
    0.0000414386,
    0.0000611511,
    0.0000872118,
    0.0001208752,
    0.0001635167,
    0.0002166349,
    0.0002818538,
];

/// Node counts of the refinement sweep.
pub const SWEEP_NODE_COUNTS: [usize; 5] = [200, 400, 600, 800, 1000];

/// Stabilised FEM, kappa = -2: `SWEEP[level - 1][i]` at `SWEEP_NODE_COUNTS[i]`.
pub const KAPPA_MINUS2_SWEEP: [[f64; 5]; 15] = [
    [
        -1829.624974,
        -1829.630384,
        -1829.630678,
        -1829.630727,
        -1829.630741,
    ],
    [
        -826.7507746,
        -826.7672405,
        -826.7681327,
        -826.7682837,
        -826.7683250,
    ],
    [
        -463.0838205,
        -463.1161451,
        -463.1178925,
        -463.1181879,
        -463.1182689,
    ],
    [
        -294.3946426,
        -294.4474328,
        -294.4502765,
        -294.4507569,
        -294.4508885,
    ],
    [
        -203.1586471,
        -203.2367320,
        -203.2409198,
        -203.2416267,
        -203.2418202,
    ],
    [
        -148.4377973,
        -148.5462267,
        -148.5520121,
        -148.5529875,
        -148.5532545,
    ],
    [
        -113.0943605,
        -113.2383931,
        -113.2460345,
        -113.2473213,
        -113.2476733,
    ],
    [
        -88.96068950,
        -89.14578334,
        -89.15554369,
        -89.15718489,
        -89.15763368,
    ],
    [
        -71.75154013,
        -71.98333473,
        -71.99548153,
        -71.99752076,
        -71.99807804,
    ],
    [
        -59.04590551,
        -59.33018952,
        -59.34499500,
        -59.34747626,
        -59.34815388,
    ],
    [
        -49.39327045,
        -49.73592836,
        -49.75366967,
        -49.75663740,
        -49.75744729,
    ],
    [
        -41.88210950,
        -42.28904304,
        -42.31000245,
        -42.31350159,
        -42.31445573,
    ],
    [
        -35.91654123,
        -36.39356270,
        -36.41802776,
        -36.42210370,
        -36.42321419,
    ],
    [
        -31.09390617,
        -31.64660327,
        -31.67486688,
        -31.67956554,
        -31.68084455,
    ],
    [
        -27.13436106,
        -27.76793634,
        -27.80029676,
        -27.80566461,
        -27.80712439,
    ],
];

/// Kappa values of the extended-nucleus study, in column order.
pub const EXTENDED_KAPPAS: [i32; 8] = [-2, 2, -3, 3, -4, 4, -5, 5];

/// Extended nucleus, stabilised FEM: the first 15 values of each kappa
/// column (same order as [`EXTENDED_KAPPAS`]), lowest state first.
pub const EXTENDED_FIRST_LEVELS: [[f64; 15]; 8] = [
    [
        -1829.6307, -826.76812, -463.11788, -294.45026, -203.24089, -148.55197, -113.24598,
        -89.155479, -71.995402, -59.344898, -49.753553, -42.309865, -36.417868, -31.674683,
        -27.800086,
    ],
    [
        -826.76830, -463.11811, -294.45051, -203.24116, -148.55226, -113.24627, -89.155772,
        -71.995698, -59.345196, -49.753854, -42.310168, -36.418172, -31.674988, -27.800392,
        -24.594617,
    ],
    [
        -790.18014, -447.43111, -286.40405, -198.59429, -145.63495, -111.29810, -87.791571,
        -71.003860, -58.601791, -49.182450, -41.861579, -36.059596, -31.383873, -27.560825,
        -24.395109,
    ],
    [
        -447.43131, -286.40434, -198.59463, -145.63533, -111.29850, -87.791981, -71.004280,
        -58.602219, -49.182885, -41.862019, -36.060039, -31.384320, -27.561275, -24.395562,
        -21.744702,
    ],
    [
        -440.28637, -282.71295, -196.45227, -144.28551, -110.39463, -87.157686, -70.542312,
        -58.255460, -48.916026, -41.652292, -35.892236, -31.247969, -27.448980, -24.301976,
        -21.665885,
    ],
    [
        -282.71318, -196.45261, -144.28592, -110.39509, -87.158179, -70.542830, -58.255996,
        -48.916575, -41.652852, -35.892805, -31.248546, -27.449563, -24.302564, -21.666478,
        -19.436397,
    ],
    [
        -280.57597, -195.20917, -143.50105, -109.86879, -86.788430, -70.273285, -58.053510,
        -48.760634, -41.530218, -35.794625, -31.168722, -27.383783, -24.247713, -21.620256,
        -19.397080,
    ],
    [
        -195.20940, -143.50143, -109.86926, -86.788962, -70.273862, -58.054121, -48.761272,
        -41.530877, -35.795300, -31.169411, -27.384484, -24.248424, -21.620976, -19.397807,
        -17.500014,
    ],
];

/// Value in the last printed row (principal quantum number 40) of each
/// extended-nucleus column.
pub const EXTENDED_ROW40: [f64; 8] = [
    -4.1222722, -4.1225951, -4.3227147, -4.3231974, -4.5461789, -4.5468189, -4.7901978, -4.7909915,
];

/// Search bracket for the light speed fitted to the exact columns.
pub const CALIBRATION_BRACKET: (f64, f64) = (137.0359, 137.0361);

/// Every exact value of both kappa = -2 and kappa = +2 columns as a
/// calibration target.
pub fn calibration_targets() -> alloc::vec::Vec<crate::physics::CalibrationTarget> {
    use crate::physics::CalibrationTarget;
    let minus = KAPPA_MINUS2_EXACT
        .iter()
        .enumerate()
        .map(|(i, e)| CalibrationTarget {
            kappa: -2,
            radial_level: i as u32 + 1,
            energy: *e,
        });
    let plus = KAPPA_PLUS2_EXACT
        .iter()
        .enumerate()
        .map(|(i, e)| CalibrationTarget {
            kappa: 2,
            radial_level: i as u32 + 2,
            energy: *e,
        });
    minus.chain(plus).collect()
}

/// Light speed fitted to [`calibration_targets`] for unit mass and Z = 118.
pub fn calibrated_light_speed() -> crate::error::Result<crate::physics::Calibration> {
    let (lo, hi) = CALIBRATION_BRACKET;
    crate::physics::calibrate_light_speed(1.0, CHARGE, &calibration_targets(), lo, hi)
}
