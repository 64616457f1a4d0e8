// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the PASS/FAIL lines always show in `cargo test` output.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};

use chiplet_bist::bist::{
    bump_response, fsm_schedule, overhead_report, run_block_test, DetectorResponse, Fault, Pattern3,
    SequentialDetector, WiredBehavior,
};
use chiplet_bist::bumpmap::{build_test_map, BumpId, Color, Lattice, LatticeKind, DEFAULT_SHORT_RADIUS_FACTOR};
use chiplet_bist::campaign::{run_campaign, CampaignConfig, FaultCategory};
use chiplet_bist::defect::{
    build_faulty_circuit, classify_defect, emit_netlist, fit_severity_curve, nominal_parasitics, ComponentKind,
    CurveFamily, DefectMagnitudes, ElectricalScenario, FaultMagnitude, FunctionalFaultClass, PhysicalDefect,
    SeverityCurve,
};
use chiplet_bist::diagnosis::{
    build_fault_dictionary, diagnosability, fault_universe, map_to_defect_range, one_gut_quad, quad_fault_instance,
    QuadFault,
};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;
type FitCase = (CurveFamily, Vec<f64>, Box<dyn Fn(f64) -> f64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn word(s: &str) -> Pattern3 {
    s.parse().expect("3-bit literal")
}

fn detector_truth_table() -> Outcome {
    let accept: BTreeSet<Pattern3> = ["011", "101", "110"].iter().map(|s| word(s)).collect();
    let mut cases = 0;
    // Green has no inverter, Red has one
    for color in [Color::Green, Color::Red] {
        for w in Pattern3::all() {
            let seen = if color == Color::Red { w.complement() } else { w };
            let mut det = SequentialDetector::new();
            let outs: Vec<Option<bool>> = seen.bits().iter().map(|&b| det.clock(b)).collect();
            let cycle_y = outs[2].ok_or("detector silent on third cycle")?;
            let resp = bump_response(w, color);
            ensure(cycle_y == accept.contains(&seen), || format!("clocked {seen}: y={cycle_y}"))?;
            ensure(resp.y == accept.contains(&seen), || format!("{color} {w}: y={}", resp.y))?;
            ensure(resp.x == seen.any(), || format!("{color} {w}: x={}", resp.x))?;
            cases += 1;
        }
    }
    Ok(format!("{cases}/16 cases"))
}

fn r(x: u8, y: u8) -> DetectorResponse {
    DetectorResponse::new(x == 1, y == 1)
}

fn table_iv_bridges() -> Outcome {
    use Color::*;
    // (bump1, bump2, w-A word, w-O word, w-A responses, w-O responses)
    let table = [
        (Green, Blue, "001", "111", [r(1, 0), r(1, 0)], [r(1, 0), r(1, 0)]),
        (Green, Red, "010", "011", [r(1, 0), r(1, 1)], [r(1, 1), r(1, 0)]),
        (Green, Black, "000", "111", [r(0, 0), r(1, 0)], [r(1, 0), r(0, 0)]),
        (Blue, Red, "000", "111", [r(0, 0), r(1, 0)], [r(1, 0), r(0, 0)]),
        (Blue, Black, "100", "101", [r(1, 0), r(1, 1)], [r(1, 1), r(1, 0)]),
        (Red, Black, "000", "110", [r(1, 0), r(1, 0)], [r(1, 0), r(1, 0)]),
    ];
    let (map, _) = one_gut_quad();
    let id = |c: Color| BumpId(c.index());
    let mut rows = 0;
    for (a, b, wa, wo, ra, ro) in table {
        for (beh, w, resp) in [(WiredBehavior::WiredAnd, wa, ra), (WiredBehavior::WiredOr, wo, ro)] {
            let rep = run_block_test(&map, &[Fault::bridge(id(a), id(b), beh)]).map_err(|e| e.to_string())?;
            let rep = &rep[0];
            let label = format!("{a}+{b} {}", beh.short_name());
            ensure(rep.received[&id(a)] == word(w), || format!("{label}: word {}", rep.received[&id(a)]))?;
            ensure(rep.received[&id(b)] == word(w), || format!("{label}: word {}", rep.received[&id(b)]))?;
            ensure(rep.responses[&id(a)] == resp[0], || format!("{label}: bump1 {}", rep.responses[&id(a)]))?;
            ensure(rep.responses[&id(b)] == resp[1], || format!("{label}: bump2 {}", rep.responses[&id(b)]))?;
            rows += 1;
        }
    }
    Ok(format!("{rows}/12 rows"))
}

fn full_detection() -> Outcome {
    let (map, _) = one_gut_quad();
    let mut detected = 0;
    for f in fault_universe() {
        let behaviors: &[WiredBehavior] = match f {
            QuadFault::StuckAt { .. } => &[WiredBehavior::WiredAnd],
            QuadFault::Bridge { .. } => &WiredBehavior::BOTH,
        };
        let mut all = true;
        for &beh in behaviors {
            let rep = run_block_test(&map, &[quad_fault_instance(f, beh)]).map_err(|e| e.to_string())?;
            all &= rep[0].responses.values().any(|r| !r.y);
        }
        ensure(all, || format!("{f} escapes"))?;
        detected += 1;
    }
    Ok(format!("{detected}/14 faults detected"))
}

fn diagnosability_check() -> Outcome {
    let dict = build_fault_dictionary();
    let d = diagnosability(&dict);
    let pairs = dict.ambiguous_pairs().len();
    ensure(pairs == 4, || format!("{pairs} ambiguous pairs"))?;
    ensure((d.numerator, d.denominator) == (87, 91), || format!("D = {d}"))?;
    let pct = d.value() * 100.0;
    ensure((pct - 95.61).abs() <= 0.02, || format!("{pct:.4}% vs 95.61%"))?;
    Ok(format!("4 pairs, D = {d} ({pct:.3}%)"))
}

fn coloring_check() -> Outcome {
    let pitch = 40.0;
    let radius = DEFAULT_SHORT_RADIUS_FACTOR * pitch;
    let mut sizes: Vec<(usize, usize)> = (1..=8).map(|n| (n, n)).collect();
    sizes.extend([(16, 16), (31, 17), (7, 64), (64, 7), (32, 32), (63, 64), (64, 64)]);
    let mut edges_scanned = 0usize;
    for (rows, cols) in sizes {
        let lattice = Lattice::new(LatticeKind::Hexagonal, rows, cols, pitch).map_err(|e| e.to_string())?;
        let (map, _) = build_test_map(lattice, radius, 1).map_err(|e| format!("{rows}x{cols}: {e}"))?;
        // independent all-pairs distance scan, no use of the adjacency graph
        let pos = map.positions();
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
                if d <= radius * (1.0 + 1e-9) {
                    edges_scanned += 1;
                    let (ci, cj) = (map.color(BumpId(i)), map.color(BumpId(j)));
                    ensure(ci != cj, || format!("{rows}x{cols}: bumps {i},{j} both {ci:?}"))?;
                }
            }
        }
    }
    Ok(format!("0 violations over {edges_scanned} edges, up to 64x64"))
}

fn campaign_config(blocks: usize, seed: u64) -> CampaignConfig {
    CampaignConfig::from_json(&format!(
        r#"{{"version":1,
            "map":{{"kind":"hexagonal","rows":16,"cols":16,"pitch_um":40}},
            "block_count":{blocks},
            "sampler":{{"n_faults":200,"mix":{{"sa":2,"bridge":2,"inter_block":1}},
                        "behavior_mix":{{"wired_and":1,"wired_or":1}},"seed":{seed}}}}}"#
    ))
    .expect("valid config")
}

fn full_map_campaign() -> Outcome {
    let mut notes = Vec::new();
    for (blocks, seed) in [(2, 2024), (4, 2025)] {
        let cfg = campaign_config(blocks, seed);
        let (map, _) = cfg.build_map().map_err(|e| e.to_string())?;
        let rep = run_campaign(&cfg).map_err(|e| e.to_string())?;
        ensure(rep.nominal.all_pass, || "nominal run fails".into())?;
        ensure(rep.metrics.injected == 200, || "wrong fault count".into())?;
        for o in &rep.faults {
            if matches!(o.category, FaultCategory::IntraBlockWiredAnd | FaultCategory::IntraBlockWiredOr) {
                let nets = o.fault.nets();
                ensure(map.color(nets[0]) != map.color(nets[1]), || format!("same-color bridge {}", o.fault))?;
            }
        }
        let m = &rep.metrics.by_category;
        for cat in [
            FaultCategory::StuckAt,
            FaultCategory::IntraBlockWiredAnd,
            FaultCategory::IntraBlockWiredOr,
            FaultCategory::InterBlockWiredAnd,
        ] {
            let c = m[&cat];
            ensure(c.injected > 0, || format!("{blocks} blocks: no {} faults drawn", cat.name()))?;
            ensure(c.detected == c.injected, || {
                format!("{blocks} blocks: {} {}/{}", cat.name(), c.detected, c.injected)
            })?;
        }
        let wor = rep
            .metrics
            .inter_block_wired_or_escape_rate
            .ok_or_else(|| format!("{blocks} blocks: no inter-block w-O drawn"))?;
        ensure(wor > 0.0, || format!("{blocks} blocks: inter-block w-O escape rate {wor}"))?;
        notes.push(format!("k={blocks}: inter-block w-O escape rate {wor:.3}"));
    }
    Ok(format!("SA, intra-block bridges, inter-block w-A all 100%; {}", notes.join(", ")))
}

fn table_ii_formulas() -> Outcome {
    let p = nominal_parasitics(ComponentKind::CuPillar, None).map_err(|e| e.to_string())?;
    ensure(rel(p.resistance, 1.11e-3) <= 1e-9, || format!("pillar R {}", p.resistance))?;
    ensure(rel(p.self_capacitance, 3.21e-15) <= 1e-9, || format!("pillar C {}", p.self_capacitance))?;
    for l in [5.0, 10.0, 100.0] {
        let q = nominal_parasitics(ComponentKind::RdlSegment, Some(l)).map_err(|e| e.to_string())?;
        let r_ref = 4.31e-3 * l;
        let cs_ref = 0.7e-15 * (1.0 + (l / 5.0 - 1.0) * 0.72);
        let cm_ref = 0.092e-15 * l;
        ensure(rel(q.resistance, r_ref) <= 1e-9, || format!("L={l}: R {}", q.resistance))?;
        ensure(rel(q.self_capacitance, cs_ref) <= 1e-9, || format!("L={l}: C_self {}", q.self_capacitance))?;
        ensure(rel(q.mutual_capacitance, cm_ref) <= 1e-9, || format!("L={l}: C_mut {}", q.mutual_capacitance))?;
    }
    let five = nominal_parasitics(ComponentKind::RdlSegment, Some(5.0)).map_err(|e| e.to_string())?;
    ensure(five.self_capacitance == 0.7e-15, || format!("L=5 C_self {:e}", five.self_capacitance))?;
    Ok("pillar + RDL L in {5, 10, 100}".into())
}

fn table_iii_probes() -> Outcome {
    use ElectricalScenario::*;
    use FaultMagnitude::{Capacitance as C, Resistance as R};
    use FunctionalFaultClass as F;
    let probes = [
        (VddOpen, C(1e-15), F::OutputSa0),
        (VddOpen, C(0.1e-15), F::NoHardFault),
        (VssOpen, C(1e-9), F::OutputSa1),
        (VssOpen, C(2e-6), F::NoHardFault),
        (SignalOpen, C(5e-15), F::WiredAndOrWiredOr),
        (SignalOpen, C(10e-15), F::NoHardFault),
        (ShortToVdd, R(400.0), F::SignalSa1),
        (ShortToVdd, R(500.0), F::NoHardFault),
        (ShortToVss, R(550.0), F::SignalSa0),
        (ShortToVss, R(600.0), F::NoHardFault),
        (SignalToSignalShort, R(150.0), F::WiredAnd),
        (SignalToSignalShort, R(200.0), F::NoHardFault),
    ];
    for (s, m, want) in probes {
        let got = classify_defect(s, m).map_err(|e| e.to_string())?.class;
        ensure(got == want, || format!("{s:?} {m:?}: {got} (want {want})"))?;
    }
    Ok(format!("{}/12 probes", probes.len()))
}

fn curve_fitting() -> Outcome {
    let xs: Vec<f64> = (0..25).map(|i| 1.0 + 0.375 * i as f64).collect();
    let cases: Vec<FitCase> = vec![
        (CurveFamily::LogLinear, vec![3.0, 2.0], Box::new(|x: f64| 3.0 + 2.0 * x.ln())),
        (CurveFamily::Exponential, vec![5.0, 0.3], Box::new(|x: f64| 5.0 * (0.3 * x).exp())),
        (CurveFamily::Polynomial { degree: 1 }, vec![-4.0, 2.5], Box::new(|x: f64| -4.0 + 2.5 * x)),
        (
            CurveFamily::Polynomial { degree: 2 },
            vec![1.0, 0.5, 0.25],
            Box::new(|x: f64| 1.0 + 0.5 * x + 0.25 * x * x),
        ),
        (
            CurveFamily::Polynomial { degree: 3 },
            vec![2.0, -1.0, 0.5, 0.125],
            Box::new(|x: f64| 2.0 - x + 0.5 * x * x + 0.125 * x * x * x),
        ),
    ];
    let mut inversions = 0;
    for (family, truth, f) in &cases {
        let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, f(x))).collect();
        let curve = fit_severity_curve(&samples, *family).map_err(|e| e.to_string())?;
        for (got, want) in curve.coefficients.iter().zip(truth) {
            ensure(rel(*got, *want) <= 1e-6, || format!("{family:?}: {got} vs {want}"))?;
        }
        if curve.is_monotone() {
            let (lo, hi) = curve.range();
            for k in 0..100 {
                let y = lo + (hi - lo) * (k as f64 + 0.5) / 100.0;
                let x = curve.invert(y).map_err(|e| e.to_string())?;
                let back = curve.eval(x).map_err(|e| e.to_string())?;
                ensure(rel(back, y) <= 1e-9, || format!("{family:?}: eval(invert({y})) = {back}"))?;
                inversions += 1;
            }
        }
    }
    ensure(inversions >= 100, || "no monotone curve exercised".into())?;

    let decay = SeverityCurve::new(CurveFamily::Exponential, vec![1000.0, -1.0], (0.0, 10.0)).map_err(|e| e.to_string())?;
    let r = decay.invert(200.0).map_err(|e| e.to_string())?;
    ensure(rel(r, 5f64.ln()) <= 1e-9, || format!("1000e^-r = 200 at r = {r}"))?;
    let bridge = Fault::bridge(BumpId(0), BumpId(1), WiredBehavior::WiredAnd);
    let est = map_to_defect_range(&bridge, ComponentKind::CuPillar, Some(&decay)).map_err(|e| e.to_string())?;
    let lower = est.geometry_bound.and_then(|g| g.lower).ok_or("no geometry lower bound")?;
    ensure(rel(lower, 5f64.ln()) <= 1e-9, || format!("geometry bound r > {lower}"))?;
    Ok(format!("5 families recovered, {inversions} inversions, r > ln 5 = {r:.9}"))
}

fn netlist_golden() -> Outcome {
    let golden = |name: &str| {
        std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR")))
            .map_err(|e| format!("{name}: {e}"))
    };
    let decks = [
        (
            "nominal_pillar.sp",
            build_faulty_circuit(ComponentKind::CuPillar, None, DefectMagnitudes::default(), None),
            "nominal Cu pillar",
        ),
        (
            "full_break_pillar.sp",
            build_faulty_circuit(
                ComponentKind::CuPillar,
                Some(PhysicalDefect::PillarCrack),
                DefectMagnitudes { c_f: Some(0.5e-15), ..Default::default() },
                None,
            ),
            "full-break Cu pillar, C_f = 0.5 fF",
        ),
        (
            "damaged_rdl.sp",
            build_faulty_circuit(
                ComponentKind::RdlSegment,
                Some(PhysicalDefect::DamagedRdl),
                DefectMagnitudes { r_f: Some(50.0), ..Default::default() },
                Some(10.0),
            ),
            "damaged RDL, L = 10 um, R_f = 50 ohm",
        ),
    ];
    for (file, circuit, title) in decks {
        let deck = emit_netlist(&circuit.map_err(|e| e.to_string())?, title).map_err(|e| e.to_string())?;
        let want = golden(file)?;
        ensure(deck.as_bytes() == want.as_bytes(), || format!("{file} differs:\n{deck}"))?;
    }
    Ok("3/3 decks byte-equal".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("campaign.json");
    std::fs::write(
        &cfg,
        r#"{"version":1,"map":{"kind":"hexagonal","rows":16,"cols":16,"pitch_um":40},"block_count":4,
            "sampler":{"n_faults":200,"mix":{"sa":1,"bridge":1,"inter_block":1},"seed":1}}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("report{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_chiplet-bist"))
            .args(["simulate", "--seed", "77", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("simulate exited with {status}"))?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "reports differ between runs".into())?;
    let two = fsm_schedule(2).map_err(|e| e.to_string())?.total_cycles();
    let four = fsm_schedule(4).map_err(|e| e.to_string())?.total_cycles();
    ensure(two < four, || format!("cycles {two} (k=2) vs {four} (k=4)"))?;
    Ok(format!("{} identical bytes; cycles {two} -> {four}", outputs[0].len()))
}

fn overhead() -> Outcome {
    let pitch = 20.0;
    let lattice = Lattice::new(LatticeKind::Rectangular, 8, 16, pitch).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    for blocks in [2, 4] {
        let (map, _) = build_test_map(lattice, 1.5 * pitch, blocks).map_err(|e| e.to_string())?;
        ensure(map.len() == 128, || format!("{} I/Os", map.len()))?;
        let o = overhead_report(&map).map_err(|e| e.to_string())?;
        got.push((o.detector_count, o.tpg_count));
    }
    ensure(got == [(64, 2), (32, 4)], || format!("{got:?}"))?;
    Ok(format!("128 I/Os -> {:?}, {:?}", got[0], got[1]))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 12] = [
        ("detector truth table", detector_truth_table),
        ("bridging table reproduction", table_iv_bridges),
        ("single-fault detection on one group", full_detection),
        ("diagnosability", diagnosability_check),
        ("proper 4-coloring", coloring_check),
        ("full-map seeded campaigns", full_map_campaign),
        ("nominal parasitic formulas", table_ii_formulas),
        ("defect-size classifier probes", table_iii_probes),
        ("severity curve fitting and inversion", curve_fitting),
        ("netlist golden files", netlist_golden),
        ("determinism and schedule length", determinism),
        ("overhead report", overhead),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{:02}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:02}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{}/{} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
