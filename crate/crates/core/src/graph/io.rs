//! JSON instance files.
//!
//! Keys are emitted in a fixed order (`version`, `seed`, `separation`, then
//! `grid` or `graph`, then `agents`), so saving is deterministic. Grid-built
//! graphs use the compact `grid` form; anything else is written out as an
//! explicit waypoint and primitive list.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::{MotionGraph, Point, PrimitiveKind, PrimitiveSpec, ProblemInstance, Waypoint};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize)]
struct InstanceDoc {
    version: u64,
    seed: u64,
    separation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<GraphDoc>,
    agents: Vec<AgentDoc>,
}

#[derive(Serialize)]
struct GridDoc {
    size: u32,
    removed: Vec<[u32; 2]>,
}

#[derive(Serialize)]
struct GraphDoc {
    waypoints: Vec<WaypointDoc>,
    primitives: Vec<PrimitiveDoc>,
}

#[derive(Serialize)]
struct WaypointDoc {
    id: u32,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct PrimitiveDoc {
    from: u32,
    to: u32,
    duration: f64,
    kind: PrimitiveKind,
}

#[derive(Serialize)]
struct AgentDoc {
    start: u32,
    destination: u32,
}

pub fn save_instance(instance: &ProblemInstance) -> Result<String> {
    let graph = instance.shared_graph().ok_or_else(|| {
        Error::InvalidInstance("per-agent graphs cannot be written to an instance file".into())
    })?;
    let (grid, graph_doc) = match graph.grid_layout() {
        Some(layout) => {
            let mut removed: Vec<[u32; 2]> = layout.removed.iter().map(|&(x, y)| [x, y]).collect();
            removed.sort_unstable();
            (
                Some(GridDoc {
                    size: layout.size,
                    removed,
                }),
                None,
            )
        }
        None => (
            None,
            Some(GraphDoc {
                waypoints: graph
                    .waypoints()
                    .iter()
                    .map(|w| WaypointDoc {
                        id: w.id,
                        x: w.position.x,
                        y: w.position.y,
                    })
                    .collect(),
                primitives: graph
                    .all_primitives()
                    .map(|p| PrimitiveDoc {
                        from: graph.waypoint(p.from).id,
                        to: graph.waypoint(p.to).id,
                        duration: p.duration,
                        kind: p.kind,
                    })
                    .collect(),
            }),
        ),
    };
    let agents = instance
        .starts()
        .iter()
        .zip(instance.destinations())
        .map(|(&s, &d)| AgentDoc {
            start: graph.waypoint(s).id,
            destination: graph.waypoint(d).id,
        })
        .collect();
    let doc = InstanceDoc {
        version: FORMAT_VERSION,
        seed: instance.seed(),
        separation: instance.separation(),
        grid,
        graph: graph_doc,
        agents,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn load_instance(text: &str) -> Result<ProblemInstance> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = value
        .as_object()
        .ok_or_else(|| Error::schema("(root)", "expected a JSON object"))?;

    let version = get_u64(root, "version", "version")?;
    if version != FORMAT_VERSION {
        return Err(Error::schema("version", format!("unsupported version {version}")));
    }
    let seed = get_u64(root, "seed", "seed")?;
    let separation = get_f64(root, "separation", "separation")?;
    if !(separation.is_finite() && separation > 0.0) {
        return Err(Error::schema("separation", "must be a positive number"));
    }

    let graph = match (root.get("grid"), root.get("graph")) {
        (Some(_), Some(_)) => {
            return Err(Error::schema("grid", "`grid` and `graph` are mutually exclusive"))
        }
        (None, None) => return Err(Error::schema("grid", "one of `grid` or `graph` is required")),
        (Some(grid), None) => parse_grid(grid)?,
        (None, Some(graph)) => parse_graph(graph)?,
    };

    let agents = root
        .get("agents")
        .ok_or_else(|| Error::schema("agents", "missing"))?
        .as_array()
        .ok_or_else(|| Error::schema("agents", "expected an array"))?;
    let mut starts = Vec::with_capacity(agents.len());
    let mut destinations = Vec::with_capacity(agents.len());
    for (i, agent) in agents.iter().enumerate() {
        let obj = agent
            .as_object()
            .ok_or_else(|| Error::schema(format!("agents[{i}]"), "expected an object"))?;
        for (key, out) in [("start", &mut starts), ("destination", &mut destinations)] {
            let field = format!("agents[{i}].{key}");
            let id = get_u32(obj, key, &field)?;
            let ix = graph
                .index_of(id)
                .ok_or_else(|| Error::schema(&field, format!("waypoint {id} is not in the graph")))?;
            out.push(ix);
        }
    }

    ProblemInstance::shared(graph, starts, destinations, separation, seed).map_err(|e| match e {
        Error::InvalidInstance(reason) => Error::schema("agents", reason),
        other => other,
    })
}

fn parse_grid(value: &Value) -> Result<MotionGraph> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::schema("grid", "expected an object"))?;
    let size = get_u32(obj, "size", "grid.size")?;
    if size < 1 {
        return Err(Error::schema("grid.size", "must be positive"));
    }
    let removed = obj
        .get("removed")
        .ok_or_else(|| Error::schema("grid.removed", "missing"))?
        .as_array()
        .ok_or_else(|| Error::schema("grid.removed", "expected an array"))?;
    let mut cells = Vec::with_capacity(removed.len());
    for (i, pair) in removed.iter().enumerate() {
        let field = format!("grid.removed[{i}]");
        let xy = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::schema(&field, "expected an [x, y] pair"))?;
        let coord = |v: &Value| {
            v.as_u64()
                .filter(|&c| c < size as u64)
                .map(|c| c as u32)
                .ok_or_else(|| Error::schema(&field, "coordinates must be integers inside the grid"))
        };
        cells.push((coord(&xy[0])?, coord(&xy[1])?));
    }
    let mut sorted = cells.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != cells.len() {
        return Err(Error::schema("grid.removed", "duplicate vertices"));
    }
    MotionGraph::grid(size, &cells).map_err(|e| Error::schema("grid", e.to_string()))
}

fn parse_graph(value: &Value) -> Result<MotionGraph> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::schema("graph", "expected an object"))?;
    let waypoints = get_array(obj, "waypoints", "graph.waypoints")?
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let field = format!("graph.waypoints[{i}]");
            let o = w.as_object().ok_or_else(|| Error::schema(&field, "expected an object"))?;
            Ok(Waypoint {
                id: get_u32(o, "id", &format!("{field}.id"))?,
                position: Point::new(
                    get_f64(o, "x", &format!("{field}.x"))?,
                    get_f64(o, "y", &format!("{field}.y"))?,
                ),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let primitives = get_array(obj, "primitives", "graph.primitives")?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let field = format!("graph.primitives[{i}]");
            let o = p.as_object().ok_or_else(|| Error::schema(&field, "expected an object"))?;
            let kind = match o.get("kind").and_then(Value::as_str) {
                Some("move") => PrimitiveKind::Move,
                Some("wait") => PrimitiveKind::Wait,
                _ => return Err(Error::schema(format!("{field}.kind"), "expected \"move\" or \"wait\"")),
            };
            Ok(PrimitiveSpec {
                from: get_u32(o, "from", &format!("{field}.from"))?,
                to: get_u32(o, "to", &format!("{field}.to"))?,
                duration: get_f64(o, "duration", &format!("{field}.duration"))?,
                kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MotionGraph::new(waypoints, &primitives).map_err(|e| Error::schema("graph", e.to_string()))
}

fn get_array<'a>(obj: &'a Map<String, Value>, key: &str, field: &str) -> Result<&'a Vec<Value>> {
    obj.get(key)
        .ok_or_else(|| Error::schema(field, "missing"))?
        .as_array()
        .ok_or_else(|| Error::schema(field, "expected an array"))
}

fn get_u64(obj: &Map<String, Value>, key: &str, field: &str) -> Result<u64> {
    obj.get(key)
        .ok_or_else(|| Error::schema(field, "missing"))?
        .as_u64()
        .ok_or_else(|| Error::schema(field, "expected a non-negative integer"))
}

fn get_u32(obj: &Map<String, Value>, key: &str, field: &str) -> Result<u32> {
    let v = get_u64(obj, key, field)?;
    u32::try_from(v).map_err(|_| Error::schema(field, "integer out of range"))
}

fn get_f64(obj: &Map<String, Value>, key: &str, field: &str) -> Result<f64> {
    obj.get(key)
        .ok_or_else(|| Error::schema(field, "missing"))?
        .as_f64()
        .ok_or_else(|| Error::schema(field, "expected a number"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_grid_instance;

    #[test]
    fn grid_round_trip() {
        let inst = generate_grid_instance(10, 3, 0.1, 0.8, 11).unwrap();
        let text = save_instance(&inst).unwrap();
        let back = load_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(save_instance(&back).unwrap(), text);
    }

    #[test]
    fn key_order() {
        let inst = generate_grid_instance(4, 1, 0.0, 0.8, 1).unwrap();
        let text = save_instance(&inst).unwrap();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("version") < pos("seed"));
        assert!(pos("seed") < pos("separation"));
        assert!(pos("separation") < pos("grid"));
        assert!(pos("grid") < pos("agents"));
    }

    #[test]
    fn explicit_graph_round_trip() {
        let wps = vec![
            Waypoint { id: 10, position: Point::new(0.0, 0.0) },
            Waypoint { id: 11, position: Point::new(0.5, 0.25) },
            Waypoint { id: 12, position: Point::new(1.0, 0.1) },
        ];
        let mut prims = Vec::new();
        for (a, b) in [(10, 11), (11, 10), (11, 12), (12, 11)] {
            prims.push(PrimitiveSpec { from: a, to: b, duration: 0.75, kind: PrimitiveKind::Move });
        }
        for id in [10, 11, 12] {
            prims.push(PrimitiveSpec { from: id, to: id, duration: 0.75, kind: PrimitiveKind::Wait });
        }
        let g = MotionGraph::new(wps, &prims).unwrap();
        let inst = ProblemInstance::shared(g, vec![0], vec![2], 0.3, 5).unwrap();
        let text = save_instance(&inst).unwrap();
        assert!(text.contains("\"graph\""));
        assert_eq!(load_instance(&text).unwrap(), inst);
    }

    #[test]
    fn missing_separation() {
        let doc = r#"{"version":1,"seed":0,"grid":{"size":3,"removed":[]},"agents":[{"start":0,"destination":8}]}"#;
        match load_instance(doc) {
            Err(Error::SchemaViolation { field, .. }) => assert_eq!(field, "separation"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_starts() {
        let doc = r#"{"version":1,"seed":0,"separation":0.8,"grid":{"size":3,"removed":[]},
            "agents":[{"start":0,"destination":8},{"start":0,"destination":6}]}"#;
        match load_instance(doc) {
            Err(Error::SchemaViolation { field, reason }) => {
                assert_eq!(field, "agents");
                assert!(reason.contains("pairwise distinct"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        match load_instance("{\n  \"version\": 1,\n  oops\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_agent_waypoint() {
        let doc = r#"{"version":1,"seed":0,"separation":0.8,"grid":{"size":3,"removed":[[1,1]]},
            "agents":[{"start":4,"destination":8}]}"#;
        match load_instance(doc) {
            Err(Error::SchemaViolation { field, .. }) => assert_eq!(field, "agents[0].start"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
