//! JSON and CSV formats for instances and results.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bigon::BigonPath;
use crate::chain::OrientedChain;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::framed::{FramedPolygon, Polygon};
use crate::geom::Point2;

/// `{"vertices": [[x, y], …], "framing_directions": [α, …]}`, the second
/// field optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<Point2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framing_directions: Option<Vec<f64>>,
}

impl PolygonFile {
    pub fn polygon(&self) -> Result<Polygon> {
        Polygon::new(self.vertices.clone())
    }

    /// The framed polygon, if directions are present.
    pub fn framed(&self, tol: f64) -> Result<Option<FramedPolygon>> {
        match &self.framing_directions {
            None => Ok(None),
            Some(d) => FramedPolygon::new(self.polygon()?, d, tol).map(Some),
        }
    }
}

impl From<&FramedPolygon> for PolygonFile {
    fn from(fp: &FramedPolygon) -> Self {
        PolygonFile {
            vertices: fp.polygon().vertices().to_vec(),
            framing_directions: Some(fp.directions()),
        }
    }
}

/// `{"centers": [[x, y], …], "signed_radii": [r, …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub centers: Vec<Point2>,
    pub signed_radii: Vec<f64>,
}

impl ChainFile {
    pub fn chain(&self, tol: f64) -> Result<OrientedChain> {
        OrientedChain::with_tol(self.centers.clone(), self.signed_radii.clone(), tol)
    }
}

impl From<&OrientedChain> for ChainFile {
    fn from(c: &OrientedChain) -> Self {
        ChainFile {
            centers: c.centers().to_vec(),
            signed_radii: c.signed_radii().to_vec(),
        }
    }
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("CSV: {e}"))
}

/// Rows `t, psi_1, …, psi_n`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = traj.psi.first().map_or(0, Vec::len);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("psi_{i}")));
    w.write_record(&header).map_err(csv_err)?;
    for (t, psi) in traj.t.iter().zip(&traj.psi) {
        let mut row = vec![t.to_string()];
        row.extend(psi.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct BigonRow {
    t: f64,
    p: f64,
    q: f64,
    r: f64,
    alpha: f64,
    phi: f64,
}

/// Rows `t, p, q, r, alpha, phi`.
pub fn write_bigon_csv<W: Write>(path: &BigonPath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (t, s) in path.t.iter().zip(&path.states) {
        w.serialize(BigonRow {
            t: *t,
            p: s.p,
            q: s.q,
            r: s.r,
            alpha: s.alpha,
            phi: s.phi,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn read_bigon_csv(text: &str) -> Result<BigonPath> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut t = Vec::new();
    let mut states = Vec::new();
    for row in r.deserialize() {
        let row: BigonRow = row.map_err(csv_err)?;
        t.push(row.t);
        states.push(crate::bigon::BigonState::new(row.p, row.q, row.r, row.alpha, row.phi)?);
    }
    BigonPath::new(t, states)
}
