use serde_json::{json, Map, Value};

use crate::metrics::MetricsReport;

/// `0.04` becomes `"004"`.
fn phi_key(phi: f64) -> String {
    format!("{phi}").replace('.', "")
}

/// Serializes a report with flat metric keys (`nde_004`, `dcd_002`, `mle`,
/// `fdo`, `iou`, ...) and the evaluation parameters under `params`.
pub fn report_to_json(report: &MetricsReport) -> String {
    let mut m = Map::new();
    for &(phi, nde, dcd) in &report.root_metrics {
        let k = phi_key(phi);
        m.insert(format!("nde_{k}"), json!(nde));
        m.insert(format!("dcd_{k}"), json!(dcd));
    }
    m.insert("mle".into(), json!(report.mle));
    m.insert("fdo".into(), json!(report.fdo));
    m.insert("iou".into(), json!(report.iou));
    let c = &report.config;
    m.insert(
        "params".into(),
        json!({
            "phi": c.phis,
            "fdo_n": c.fdo_n,
            "fdo_sum": "per-point direction distances summed over fdo_n points, averaged over fibers",
            "radius": c.radius,
            "grid_res": c.grid_res,
            "step": report.step,
            "den_excludes_self": true,
        }),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes");
    s.push('\n');
    s
}
