use std::path::Path;

use dirichlet_pc::characters::{CharacterLabel, DirichletCharacter};
use dirichlet_pc::store::{
    cache_path, decode_zero_set, encode_zero_set, read_zero_cache, write_table, write_zero_cache, Cell, StoreError,
    TableFormat,
};
use dirichlet_pc::zeros::{default_mesh_step, scan_zeros, ZeroSet};

fn sample() -> ZeroSet {
    let chi = DirichletCharacter::from_label(CharacterLabel::new(5, 2).unwrap()).unwrap();
    scan_zeros(&chi, 20.0, default_mesh_step(5, 20.0)).unwrap()
}

#[test]
fn every_single_byte_corruption_is_rejected() {
    let bytes = encode_zero_set(&sample());
    let path = Path::new("mem.zc");
    assert!(decode_zero_set(&bytes, path).is_ok());
    for i in 0..bytes.len() {
        for flip in [0x01u8, 0x80] {
            let mut bad = bytes.clone();
            bad[i] ^= flip;
            assert!(decode_zero_set(&bad, path).is_err(), "byte {i} flip {flip:#x} accepted");
        }
    }
    for cut in [0, 4, bytes.len() / 2, bytes.len() - 1] {
        assert!(decode_zero_set(&bytes[..cut], path).is_err());
    }
}

#[test]
fn round_trip_is_bit_exact() {
    let set = sample();
    let dir = tempfile::tempdir().unwrap();
    let path = cache_path(dir.path(), set.character(), set.height());
    assert!(path.ends_with("zeros/q5/chi2_T20.zc"));
    write_zero_cache(&set, &path, false).unwrap();
    let back = read_zero_cache(&path).unwrap();
    let (a, b) = (set.ordinates(), back.ordinates());
    assert_eq!(a.len(), b.len());
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_eq!(back.scan_params(), set.scan_params());
    assert_eq!(back.completeness(), set.completeness());
    let first = std::fs::read(&path).unwrap();
    write_zero_cache(&back, &path, false).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_zero_cache(&dir.path().join("nope.zc")), Err(StoreError::Io { .. })));
}

#[test]
fn csv_and_json_tables() {
    let rows = vec![
        vec![Cell::from(1u64), Cell::from(0.5), Cell::from("in-range")],
        vec![Cell::from(2u64), Cell::from(f64::NAN), Cell::from("extrapolated")],
    ];
    let mut csv = Vec::new();
    write_table(&["q", "v", "regime"], rows.clone(), TableFormat::Csv, &mut csv).unwrap();
    assert_eq!(
        String::from_utf8(csv).unwrap(),
        "q,v,regime\n1,5.0000000000000000e-1,in-range\n2,NaN,extrapolated\n"
    );
    let mut json = Vec::new();
    write_table(&["q", "v", "regime"], rows, TableFormat::Json, &mut json).unwrap();
    let parsed: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(parsed[0]["v"], 0.5);
    assert!(parsed[1]["v"].is_null());
}
