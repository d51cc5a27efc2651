use super::*;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn deposit(pad_index: u8, volume_pct: f64) -> PasteDeposit {
    PasteDeposit {
        board_id: "B1".into(),
        component_id: "C1".into(),
        pad_index,
        offset_x_um: 76.84,
        offset_y_um: 71.12,
        angle_deg: -6.92,
        volume_pct,
    }
}

fn placement() -> PlacementRecord {
    PlacementRecord {
        board_id: "B1".into(),
        component_id: "C1".into(),
        spec_name: "C0402".into(),
        setting_id: 1,
        designed_offset_x_um: 235.37,
        designed_offset_y_um: 0.0,
        designed_angle_deg: -6.92,
        place_pressure_gf: 150.0,
        tested_offset_x_um: 242.17,
        tested_offset_y_um: -12.4,
        tested_angle_deg: -4.22,
    }
}

fn c0402() -> ComponentSpec {
    ComponentSpec::new("C0402", ComponentKind::Capacitor, 1000.0, 500.0).unwrap()
}

#[test]
fn builtin_specs_match_component_table() {
    let specs = builtin_specs();
    assert_eq!(specs.len(), 6);
    let expect = [
        ("R01005", ComponentKind::Resistor, 400.0, 200.0),
        ("R0201", ComponentKind::Resistor, 600.0, 300.0),
        ("R0402", ComponentKind::Resistor, 1000.0, 500.0),
        ("C01005", ComponentKind::Capacitor, 400.0, 200.0),
        ("C0201", ComponentKind::Capacitor, 600.0, 300.0),
        ("C0402", ComponentKind::Capacitor, 1000.0, 500.0),
    ];
    for (name, kind, l, w) in expect {
        let s = specs.iter().find(|s| s.name == name).unwrap();
        assert_eq!(s.kind, kind);
        assert_eq!(s.length_um, l);
        assert_eq!(s.width_um, w);
        assert!(s.length_um >= s.width_um && s.width_um > 0.0);
    }
}

#[test]
fn spec_rejects_inverted_dimensions() {
    assert!(ComponentSpec::new("bad", ComponentKind::Resistor, 200.0, 400.0).is_err());
    assert!(ComponentSpec::new("bad", ComponentKind::Resistor, 400.0, 0.0).is_err());
    assert!(ComponentSpec::new("bad", ComponentKind::Resistor, 400.0, -1.0).is_err());
}

#[test]
fn pair_deposits_orders_by_pad_index() {
    let ds = vec![deposit(2, 80.0), deposit(1, 80.0)];
    let (p1, p2) = pair_deposits(&ds).unwrap();
    assert_eq!(p1.pad_index, 1);
    assert_eq!(p2.pad_index, 2);
}

#[test]
fn pair_deposits_rejects_wrong_count() {
    let one = vec![deposit(1, 80.0)];
    assert!(matches!(
        pair_deposits(&one),
        Err(DomainError::MissingDeposit { count: 1, .. })
    ));
    let three = vec![deposit(1, 80.0), deposit(2, 80.0), deposit(1, 80.0)];
    assert!(matches!(
        pair_deposits(&three),
        Err(DomainError::MissingDeposit { count: 3, .. })
    ));
    assert!(matches!(
        pair_deposits(&[]),
        Err(DomainError::MissingDeposit { count: 0, .. })
    ));
}

#[test]
fn pair_deposits_rejects_duplicate_pad() {
    let ds = vec![deposit(2, 80.0), deposit(2, 81.0)];
    assert!(matches!(
        pair_deposits(&ds),
        Err(DomainError::DuplicatePad { pad_index: 2, .. })
    ));
}

#[test]
fn pair_deposits_rejects_mixed_components() {
    let mut other = deposit(2, 80.0);
    other.component_id = "C2".into();
    let ds = vec![deposit(1, 80.0), other];
    assert!(matches!(
        pair_deposits(&ds),
        Err(DomainError::MixedComponent { .. })
    ));
}

#[test]
fn featurize_scales_designed_offset_by_length() {
    // Setting-1 designed paste offset X on a 1000 um long C0402.
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let row = featurize(pair, &placement(), &c0402()).unwrap();
    assert_relative_eq!(row.x6, 0.23537, max_relative = 1e-12);
    assert_relative_eq!(row.x1, 0.07684, max_relative = 1e-12);
    assert_relative_eq!(row.x2, 71.12 / 500.0, max_relative = 1e-12);
}

#[test]
fn featurize_volume_mean_and_difference() {
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let row = featurize(pair, &placement(), &c0402()).unwrap();
    assert_eq!(row.x4, 0.80);
    assert_eq!(row.x5, 0.00);
}

#[test]
fn featurize_shift_targets() {
    // 242.17 um tested vs 235.37 um designed on a 1000 um part: 6.8 um shift.
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let row = featurize(pair, &placement(), &c0402()).unwrap();
    assert_relative_eq!(row.y_x, 0.0068, max_relative = 1e-9);
    assert_relative_eq!(row.y_ang, 2.70, max_relative = 1e-9);
}

#[test]
fn featurize_identity_when_tested_equals_designed() {
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let mut p = placement();
    p.tested_offset_x_um = p.designed_offset_x_um;
    p.tested_offset_y_um = p.designed_offset_y_um;
    p.tested_angle_deg = p.designed_angle_deg;
    let row = featurize(pair, &p, &c0402()).unwrap();
    assert_eq!(row.y_x, 0.0);
    assert_eq!(row.y_y, 0.0);
    assert_eq!(row.y_ang, 0.0);
}

#[test]
fn featurize_rejects_non_finite() {
    let mut bad = deposit(1, 80.0);
    bad.offset_x_um = f64::NAN;
    let good = deposit(2, 80.0);
    assert!(matches!(
        featurize((&bad, &good), &placement(), &c0402()),
        Err(DomainError::NonFiniteInput { .. })
    ));
}

#[test]
fn featurize_is_deterministic() {
    let ds = vec![deposit(1, 83.2), deposit(2, 77.9)];
    let pair = pair_deposits(&ds).unwrap();
    let a = featurize(pair, &placement(), &c0402()).unwrap();
    let b = featurize(pair, &placement(), &c0402()).unwrap();
    assert_eq!(a, b);
    for (va, vb) in a.predictors().iter().zip(b.predictors().iter()) {
        assert_eq!(va.to_bits(), vb.to_bits());
    }
}

#[test]
fn join_empty_inputs() {
    let (rows, diag) = join_spi_aoi(&[], &[], &SpecTable::builtin()).unwrap();
    assert!(rows.is_empty());
    assert!(diag.is_clean());
}

#[test]
fn join_orphan_placement_consumes_lone_deposit() {
    let deposits = vec![deposit(1, 80.0)];
    let placements = vec![placement()];
    let (rows, diag) = join_spi_aoi(&deposits, &placements, &SpecTable::builtin()).unwrap();
    assert!(rows.is_empty());
    assert_eq!(diag.orphan_placements.len(), 1);
    assert_eq!(
        diag.orphan_placements[0].reason,
        OrphanReason::MissingDeposits { count: 1 }
    );
    // The lone deposit belongs to the orphaned placement, so it is not itself.
    assert!(diag.orphan_deposits.is_empty());
}

#[test]
fn join_reports_orphan_deposits() {
    let mut stray = deposit(1, 80.0);
    stray.component_id = "C9".into();
    let deposits = vec![deposit(1, 80.0), deposit(2, 80.0), stray];
    let placements = vec![placement()];
    let (rows, diag) = join_spi_aoi(&deposits, &placements, &SpecTable::builtin()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(diag.orphan_placements.is_empty());
    assert_eq!(diag.orphan_deposits.len(), 1);
    assert_eq!(diag.orphan_deposits[0].component_id, "C9");
}

#[test]
fn join_unknown_spec_is_fatal() {
    let deposits = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let mut p = placement();
    p.spec_name = "X9999".into();
    let err = join_spi_aoi(&deposits, &[p], &SpecTable::builtin()).unwrap_err();
    assert!(matches!(err, DomainError::UnknownSpec { .. }));
}

#[test]
fn join_output_is_ordered_by_board_and_component() {
    let mut deposits = Vec::new();
    let mut placements = Vec::new();
    for (board, comp) in [("B2", "C1"), ("B1", "C2"), ("B1", "C1")] {
        for pad in [1u8, 2] {
            let mut d = deposit(pad, 80.0);
            d.board_id = board.into();
            d.component_id = comp.into();
            deposits.push(d);
        }
        let mut p = placement();
        p.board_id = board.into();
        p.component_id = comp.into();
        placements.push(p);
    }
    let (rows, diag) = join_spi_aoi(&deposits, &placements, &SpecTable::builtin()).unwrap();
    assert!(diag.is_clean());
    let keys: Vec<(String, String)> = rows
        .iter()
        .map(|r| (r.board_id.clone(), r.component_id.clone()))
        .collect();
    assert_eq!(
        keys,
        vec![
            ("B1".to_string(), "C1".to_string()),
            ("B1".to_string(), "C2".to_string()),
            ("B2".to_string(), "C1".to_string()),
        ]
    );
}

#[test]
fn shift_summary_constant_sample() {
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let row = featurize(pair, &placement(), &c0402()).unwrap();
    let rows = vec![row; 20];
    let summaries = shift_summary(&rows, &c0402()).unwrap();
    assert_eq!(summaries.len(), 1);
    let s = &summaries[0];
    assert_eq!(s.count, 20);
    assert_relative_eq!(s.shift_x_um.avg, 6.8, max_relative = 1e-9);
    assert_relative_eq!(s.shift_x_um.min, 6.8, max_relative = 1e-9);
    assert_relative_eq!(s.shift_x_um.max, 6.8, max_relative = 1e-9);
    assert_eq!(s.shift_x_um.std, 0.0);
}

#[test]
fn shift_summary_two_point_stats() {
    // Table-4-style endpoints: -9.7 and 25.3 um on a 1000 um part.
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let mut a = placement();
    a.tested_offset_x_um = a.designed_offset_x_um - 9.7;
    let mut b = placement();
    b.tested_offset_x_um = b.designed_offset_x_um + 25.3;
    let rows = vec![
        featurize(pair, &a, &c0402()).unwrap(),
        featurize(pair, &b, &c0402()).unwrap(),
    ];
    let summaries = shift_summary(&rows, &c0402()).unwrap();
    let s = &summaries[0].shift_x_um;
    assert_relative_eq!(s.min, -9.7, max_relative = 1e-9);
    assert_relative_eq!(s.max, 25.3, max_relative = 1e-9);
    assert_relative_eq!(s.avg, 7.8, max_relative = 1e-9);
}

#[test]
fn shift_summary_rejects_mixed_specs() {
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let mut row = featurize(pair, &placement(), &c0402()).unwrap();
    row.spec_name = "R0402".into();
    let err = shift_summary(&[row], &c0402()).unwrap_err();
    assert!(matches!(err, DomainError::MixedSpec { .. }));
}

#[test]
fn shift_summary_concatenation_of_disjoint_settings() {
    let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
    let pair = pair_deposits(&ds).unwrap();
    let mut a = placement();
    a.setting_id = 1;
    let mut b = placement();
    b.setting_id = 2;
    b.tested_offset_x_um += 11.0;
    let ra = featurize(pair, &a, &c0402()).unwrap();
    let rb = featurize(pair, &b, &c0402()).unwrap();

    let merged = shift_summary(&[ra.clone(), rb.clone()], &c0402()).unwrap();
    let mut separate = shift_summary(&[ra], &c0402()).unwrap();
    separate.extend(shift_summary(&[rb], &c0402()).unwrap());
    assert_eq!(merged, separate);
}

#[test]
fn csv_round_trip_features() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("features.csv");
    let ds = vec![deposit(1, 83.456789), deposit(2, 77.1)];
    let pair = pair_deposits(&ds).unwrap();
    let rows = vec![featurize(pair, &placement(), &c0402()).unwrap()];
    write_features_csv(&path, &rows).unwrap();
    let back = read_features_csv(&path).unwrap();
    assert_eq!(rows, back);
    assert_eq!(rows[0].x5.to_bits(), back[0].x5.to_bits());
}

#[test]
fn csv_error_carries_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spi.csv");
    std::fs::write(
        &path,
        "board_id,component_id,pad_index,offset_x_um,offset_y_um,angle_deg,volume_pct\nB1,C1,1,0.0,0.0,0.0,80.0\nB1,C2,1,not_a_number,0.0,0.0,80.0\n",
    )
    .unwrap();
    let err = read_spi_csv(&path).unwrap_err();
    match err {
        DomainError::Csv { line, message, .. } => {
            assert_eq!(line, 3);
            assert!(message.contains("offset_x_um"), "message: {message}");
        }
        other => panic!("expected Csv error, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn round_trip_offsets_through_ratios(
        designed in -400.0f64..400.0,
        tested in -400.0f64..400.0,
    ) {
        let ds = vec![deposit(1, 80.0), deposit(2, 80.0)];
        let pair = pair_deposits(&ds).unwrap();
        let mut p = placement();
        p.designed_offset_x_um = designed;
        p.tested_offset_x_um = tested;
        let spec = c0402();
        let row = featurize(pair, &p, &spec).unwrap();
        prop_assert!((row.x6 * spec.length_um - designed).abs() <= 1e-9 * designed.abs().max(1.0));
        prop_assert!(((row.y_x + row.x6) * spec.length_um - tested).abs() <= 1e-9 * tested.abs().max(1.0));
    }

    #[test]
    fn volume_swap_negates_x5_and_preserves_x4(
        v1 in 1.0f64..200.0,
        v2 in 1.0f64..200.0,
    ) {
        let ds = vec![deposit(1, v1), deposit(2, v2)];
        let swapped = vec![deposit(1, v2), deposit(2, v1)];
        let row = featurize(pair_deposits(&ds).unwrap(), &placement(), &c0402()).unwrap();
        let srow = featurize(pair_deposits(&swapped).unwrap(), &placement(), &c0402()).unwrap();
        prop_assert_eq!(row.x5, -srow.x5);
        prop_assert_eq!(row.x4.to_bits(), srow.x4.to_bits());
    }

    #[test]
    fn join_row_count_plus_orphans_equals_placements(
        n in 0usize..12,
        drop_mask in proptest::collection::vec(0u8..4, 12),
    ) {
        let mut deposits = Vec::new();
        let mut placements = Vec::new();
        for i in 0..n {
            let comp = format!("C{i}");
            let mut p = placement();
            p.component_id = comp.clone();
            placements.push(p);
            // 0: both pads, 1: pad 1 only, 2: pad 2 only, 3: none
            let keep = drop_mask[i];
            for pad in [1u8, 2] {
                let dropped = keep == 3 || (keep == 1 && pad == 2) || (keep == 2 && pad == 1);
                if !dropped {
                    let mut d = deposit(pad, 80.0);
                    d.component_id = comp.clone();
                    deposits.push(d);
                }
            }
        }
        let (rows, diag) = join_spi_aoi(&deposits, &placements, &SpecTable::builtin()).unwrap();
        prop_assert_eq!(rows.len() + diag.orphan_placements.len(), placements.len());
        prop_assert!(diag.orphan_deposits.is_empty());
    }
}
