//! The reference configurations compiled into the binary.

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../configs/", $name, ".toml")))),*]
    };
}

/// `(name, toml)` for every contract and volatility of the reference study.
pub const BUNDLED: &[(&str, &str)] = bundled![
    "contract1_sigma03",
    "contract1_sigma06",
    "contract1_sigma09",
    "contract1_sigma12",
    "contract2_sigma03",
    "contract2_sigma06",
    "contract2_sigma09",
    "contract2_sigma12",
    "contract3_sigma03",
    "contract3_sigma06",
    "contract3_sigma09",
    "contract3_sigma12",
    "contract4_sigma03",
    "contract4_sigma06",
    "contract4_sigma09",
    "contract4_sigma12",
];

pub fn find(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Contract number and volatility index encoded in a bundled name.
pub fn decode(name: &str) -> Option<(u8, usize)> {
    let rest = name.strip_prefix("contract")?;
    let (c, s) = rest.split_once("_sigma")?;
    let c: u8 = c.parse().ok()?;
    let s = ["03", "06", "09", "12"].iter().position(|t| *t == s)?;
    Some((c, s))
}
