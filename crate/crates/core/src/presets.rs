//! The four reference storage contracts and the reference price model
//! (second-order map with `γ = 0.5` on an OU factor), with published values.

use crate::contract::{ContractSpec, EnergyGrid, SettlementPenalty, TimeGrid};
use crate::model::{MarketParams, OuParams, PolynomialMap, PriceModel};

pub const SIGMAS: [f64; 4] = [0.3, 0.6, 0.9, 1.2];
pub const GAMMA: f64 = 0.5;
pub const KAPPA: f64 = 0.3;
pub const THETA: f64 = 10.1;
pub const X0: f64 = 10.0;
pub const RATE: f64 = 0.01;

fn general_time() -> TimeGrid {
    TimeGrid {
        t0: 0.0,
        maturity: 1.0,
        exercises: 50,
    }
}

/// Contract 1–4; panics on any other number.
pub fn contract(n: u8) -> ContractSpec {
    let battery = ContractSpec {
        time: general_time(),
        grid: EnergyGrid {
            e_min: 0.0,
            e_max: 15.0,
            delta: 1.0,
        },
        e_start: 7.0,
        i_min_op: -6.0,
        i_max_op: 6.0,
        i_min_market: -0.1,
        i_min_b: -4.0,
        i_max_b: 4.0,
        eta: 0.95,
        q_b: -3.0,
        settlement: SettlementPenalty::ThresholdConstant {
            threshold: 7.0,
            penalty: -350.0,
        },
    };
    let car_park = ContractSpec {
        time: general_time(),
        grid: EnergyGrid {
            e_min: 0.0,
            e_max: 12.0,
            delta: 1.0,
        },
        e_start: 6.0,
        i_min_op: -4.0,
        i_max_op: 4.0,
        i_min_market: -0.1,
        i_min_b: -3.0,
        i_max_b: 3.0,
        eta: 0.9,
        q_b: -10.0,
        settlement: SettlementPenalty::ThresholdConstant {
            threshold: 6.0,
            penalty: -2000.0,
        },
    };
    match n {
        1 => battery,
        2 => ContractSpec {
            eta: 1.0,
            ..battery
        },
        3 => car_park,
        4 => ContractSpec {
            e_start: 2.0,
            settlement: SettlementPenalty::PiecewiseLinear {
                e_fix: 6.0,
                slope_penalty: 1000.0,
                floor_penalty: 2000.0,
            },
            ..car_park
        },
        _ => panic!("reference contracts are numbered 1 to 4, got {n}"),
    }
}

pub fn model(sigma: f64) -> PriceModel {
    PriceModel::new(
        PolynomialMap::second_order(GAMMA).expect("γ = 0.5 is a valid factor"),
        OuParams {
            kappa: KAPPA,
            theta: THETA,
            sigma,
            x0: X0,
        },
        MarketParams { r: RATE },
    )
}

/// Published COS values at `N = 100, 150, 200`, indexed `[contract-1][sigma]`.
pub const COS_VALUES: [[[f64; 3]; 4]; 4] = [
    [
        [0.0174, -0.0003, 0.0000],
        [-0.0002, 0.0000, 0.0000],
        [0.0087, 0.0091, 0.0091],
        [0.1388, 0.1434, 0.1433],
    ],
    [
        [1.9301, 1.8624, 1.8630],
        [3.4770, 3.4640, 3.4641],
        [5.2304, 5.2291, 5.2291],
        [7.1323, 7.1465, 7.1464],
    ],
    [
        [0.0114, -0.0002, 0.0000],
        [0.0000, 0.0000, 0.0000],
        [-0.0001, 0.0000, 0.0000],
        [0.0000, 0.0004, 0.0004],
    ],
    [
        [-331.3426, -331.3153, -331.3160],
        [-330.7729, -330.7741, -330.7742],
        [-329.3769, -330.3782, -330.3782],
        [-330.1309, -330.1443, -330.1442],
    ],
];

/// Published LSMC 95% intervals, `[contract-1][sigma] = (low, high)`.
pub const LSMC_INTERVALS: [[(f64, f64); 4]; 4] = [
    [
        (0.0, 0.0),
        (-0.0005, 0.0014),
        (-0.0051, 0.0222),
        (0.1399, 0.1943),
    ],
    [
        (1.8550, 1.9254),
        (3.4642, 3.6050),
        (5.2075, 5.4154),
        (7.1293, 7.3802),
    ],
    [
        (0.0, 0.0),
        (-0.0001, 0.0),
        (-0.0008, 0.0012),
        (-0.0044, 0.0020),
    ],
    [
        (-331.3365, -331.2007),
        (-330.7876, -330.5472),
        (-330.3961, -330.0825),
        (-330.1435, -329.7515),
    ],
];

/// Published initial-time Greeks `(Δ, Γ, ν)` per contract at σ = 0.6.
pub const GREEKS_SIGMA_06: [(f64, f64, f64); 4] = [
    (0.0000, 0.0001, 0.0000),
    (0.1663, 0.8336, 0.3054),
    (0.0000, 0.0000, 0.0000),
    (-9.1176, 0.4957, 0.1260),
];

/// Published initial-time Greeks `(Δ, Γ, ν)` per contract at σ = 1.2.
pub const GREEKS_SIGMA_12: [(f64, f64, f64); 4] = [
    (-0.0443, 0.0516, 0.0372),
    (-0.2294, 0.4055, 0.2934),
    (-0.0003, 0.0003, 0.0002),
    (-9.3865, 0.3245, 0.1237),
];

pub fn sigma_index(sigma: f64) -> Option<usize> {
    SIGMAS.iter().position(|&s| (s - sigma).abs() < 1e-12)
}
