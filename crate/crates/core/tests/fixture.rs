use sha2::{Digest, Sha256};

use qppinv::lte::{load_table, BUNDLED_FIXTURE};

const FIXTURE_SHA256: &str = "82c2bfacfeacfa97223e6d6641069e66c68cb0efd420df9e6e7366ba742d4b79";

#[test]
fn bundled_fixture_checksum() {
    let digest = Sha256::digest(BUNDLED_FIXTURE.as_bytes());
    assert_eq!(hex::encode(digest), FIXTURE_SHA256);
}

#[test]
fn fixture_file_loads_and_matches_bundled_copy() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/lte_nonquadratic.csv");
    assert_eq!(std::fs::read_to_string(path).unwrap(), BUNDLED_FIXTURE);
    let rows = load_table(path).unwrap();
    assert_eq!(rows.len(), 35);
    assert!(rows.iter().all(|r| r.published_inverse.degree() > 2));
    assert!(rows.windows(2).all(|w| w[0].length <= w[1].length));
}

#[test]
fn load_rejects_missing_file() {
    assert!(load_table("/nonexistent/table.csv").is_err());
}
