use std::path::Path;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{read_text, write_all, FormatError, FormatResult};
use crate::camera::{Camera, Projection};
use crate::geom::Vec3;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraDoc {
    mode: String,
    /// Row-major `[R | t]`.
    extrinsics: [f64; 12],
    intrinsics: IntrinsicsDoc,
    width: u32,
    height: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntrinsicsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    fx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sy: Option<f64>,
    cx: f64,
    cy: f64,
}

pub fn camera_to_json(cam: &Camera) -> String {
    let r = cam.rotation();
    let t = cam.translation();
    let mut extrinsics = [0.0; 12];
    for i in 0..3 {
        for j in 0..3 {
            extrinsics[4 * i + j] = r[(i, j)];
        }
        extrinsics[4 * i + 3] = t[i];
    }
    let (mode, intrinsics) = match cam.projection() {
        Projection::Perspective { fx, fy, cx, cy } => {
            ("perspective", IntrinsicsDoc { fx: Some(fx), fy: Some(fy), sx: None, sy: None, cx, cy })
        }
        Projection::Orthographic { sx, sy, cx, cy } => {
            ("orthographic", IntrinsicsDoc { fx: None, fy: None, sx: Some(sx), sy: Some(sy), cx, cy })
        }
    };
    let doc = CameraDoc { mode: mode.into(), extrinsics, intrinsics, width: cam.width(), height: cam.height() };
    let mut s = serde_json::to_string_pretty(&doc).expect("camera serializes");
    s.push('\n');
    s
}

pub fn camera_from_json(text: &str) -> FormatResult<Camera> {
    let doc: CameraDoc = serde_json::from_str(text)
        .map_err(|e| FormatError::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let i = &doc.intrinsics;
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| FormatError::schema("intrinsics", format!("{} camera needs {name}", doc.mode)));
    let forbid = |v: Option<f64>, name: &str| match v {
        Some(_) => Err(FormatError::schema("intrinsics", format!("{name} is not valid for a {} camera", doc.mode))),
        None => Ok(()),
    };
    let projection = match doc.mode.as_str() {
        "perspective" => {
            forbid(i.sx, "sx")?;
            forbid(i.sy, "sy")?;
            Projection::Perspective { fx: need(i.fx, "fx")?, fy: need(i.fy, "fy")?, cx: i.cx, cy: i.cy }
        }
        "orthographic" => {
            forbid(i.fx, "fx")?;
            forbid(i.fy, "fy")?;
            Projection::Orthographic { sx: need(i.sx, "sx")?, sy: need(i.sy, "sy")?, cx: i.cx, cy: i.cy }
        }
        other => return Err(FormatError::schema("mode", format!("unknown camera mode {other:?}"))),
    };
    let e = &doc.extrinsics;
    let rotation = Matrix3::new(e[0], e[1], e[2], e[4], e[5], e[6], e[8], e[9], e[10]);
    let translation = Vec3::new(e[3], e[7], e[11]);
    Camera::new(rotation, translation, projection, doc.width, doc.height).map_err(|e| FormatError::schema("camera", e.to_string()))
}

pub fn read_camera(path: &Path) -> FormatResult<Camera> {
    camera_from_json(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn write_camera(path: &Path, cam: &Camera) -> FormatResult<()> {
    write_all(path, camera_to_json(cam).as_bytes())
}
