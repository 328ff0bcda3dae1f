#![no_main]

use covertnet::graphstates::GraphSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = GraphSpec::from_adjacency_text(text) {
        let again = GraphSpec::from_adjacency_text(&g.to_adjacency_text()).expect("printed graph reparses");
        assert_eq!(again, g);
    }
});
