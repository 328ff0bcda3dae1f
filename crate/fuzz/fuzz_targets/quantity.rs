#![no_main]

use covertnet::units::{parse_quantity, parse_range, QuantityKind};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let kind = match selector % 3 {
        0 => QuantityKind::Time,
        1 => QuantityKind::Frequency,
        _ => QuantityKind::Separation,
    };
    if let Ok(v) = parse_quantity(kind, text) {
        assert!(v.is_finite());
    }
    if let Ok((lo, hi)) = parse_range(kind, text) {
        assert!(lo <= hi);
    }
});
