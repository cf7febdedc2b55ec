//! GraphML export and import for character graphs.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use crate::error::{Error, Result};
use crate::graph::CharacterGraph;

fn xml_err(e: impl std::fmt::Display) -> Error {
    Error::MalformedInput {
        format: "GraphML",
        detail: e.to_string(),
    }
}

/// Writes the graph as GraphML: nodes with string attributes, undirected
/// edges with a `weight` data key.
pub fn write_graphml<W: Write>(g: &CharacterGraph, writer: W) -> Result<()> {
    let mut w = Writer::new_with_indent(writer, b' ', 2);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .map_err(xml_err)?;

    let mut root = BytesStart::new("graphml");
    root.push_attribute(("xmlns", "http://graphml.graphdrawing.org/xmlns"));
    w.write_event(Event::Start(root)).map_err(xml_err)?;

    // One key per distinct node-attribute name, plus the edge weight.
    let mut attr_names: Vec<&str> = g
        .node_attributes()
        .values()
        .flat_map(|attrs| attrs.keys().map(String::as_str))
        .collect();
    attr_names.sort_unstable();
    attr_names.dedup();
    let key_ids: BTreeMap<&str, String> = attr_names
        .iter()
        .enumerate()
        .map(|(i, name)| (*name, format!("d{i}")))
        .collect();

    for (name, key_id) in &key_ids {
        let mut key = BytesStart::new("key");
        key.push_attribute(("id", key_id.as_str()));
        key.push_attribute(("for", "node"));
        key.push_attribute(("attr.name", *name));
        key.push_attribute(("attr.type", "string"));
        w.write_event(Event::Empty(key)).map_err(xml_err)?;
    }
    let mut wkey = BytesStart::new("key");
    wkey.push_attribute(("id", "weight"));
    wkey.push_attribute(("for", "edge"));
    wkey.push_attribute(("attr.name", "weight"));
    wkey.push_attribute(("attr.type", "long"));
    w.write_event(Event::Empty(wkey)).map_err(xml_err)?;

    let mut graph = BytesStart::new("graph");
    graph.push_attribute(("id", "G"));
    graph.push_attribute(("edgedefault", "undirected"));
    w.write_event(Event::Start(graph)).map_err(xml_err)?;

    for id in g.nodes() {
        let mut node = BytesStart::new("node");
        node.push_attribute(("id", id.as_str()));
        let attrs = g.attributes(id);
        if attrs.is_none_or(|a| a.is_empty()) {
            w.write_event(Event::Empty(node)).map_err(xml_err)?;
            continue;
        }
        w.write_event(Event::Start(node)).map_err(xml_err)?;
        for (name, value) in attrs.unwrap() {
            let mut data = BytesStart::new("data");
            data.push_attribute(("key", key_ids[name.as_str()].as_str()));
            w.write_event(Event::Start(data)).map_err(xml_err)?;
            w.write_event(Event::Text(BytesText::new(value)))
                .map_err(xml_err)?;
            w.write_event(Event::End(BytesEnd::new("data")))
                .map_err(xml_err)?;
        }
        w.write_event(Event::End(BytesEnd::new("node")))
            .map_err(xml_err)?;
    }

    for (u, v, weight) in g.edges() {
        let mut edge = BytesStart::new("edge");
        edge.push_attribute(("source", g.id(u)));
        edge.push_attribute(("target", g.id(v)));
        w.write_event(Event::Start(edge)).map_err(xml_err)?;
        let mut data = BytesStart::new("data");
        data.push_attribute(("key", "weight"));
        w.write_event(Event::Start(data)).map_err(xml_err)?;
        w.write_event(Event::Text(BytesText::new(&weight.to_string())))
            .map_err(xml_err)?;
        w.write_event(Event::End(BytesEnd::new("data")))
            .map_err(xml_err)?;
        w.write_event(Event::End(BytesEnd::new("edge")))
            .map_err(xml_err)?;
    }

    w.write_event(Event::End(BytesEnd::new("graph")))
        .map_err(xml_err)?;
    w.write_event(Event::End(BytesEnd::new("graphml")))
        .map_err(xml_err)?;
    Ok(())
}

/// Reads a GraphML document written by [`write_graphml`] (or compatible:
/// undirected edges, string node attributes, integer edge weights).
pub fn read_graphml<R: BufRead>(reader: R) -> Result<CharacterGraph> {
    let mut r = Reader::from_reader(reader);
    r.config_mut().trim_text(true);

    // key id -> (is_node_key, attr.name)
    let mut keys: BTreeMap<String, (bool, String)> = BTreeMap::new();
    let mut nodes: Vec<String> = Vec::new();
    let mut attributes: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut edges: Vec<(String, String, u64)> = Vec::new();

    #[derive(Default)]
    struct Context {
        node_id: Option<String>,
        edge: Option<(String, String)>,
        data_key: Option<String>,
        text: String,
        edge_weight: Option<u64>,
    }
    let mut ctx = Context::default();
    let mut buf = Vec::new();

    let attr_of = |e: &BytesStart, name: &str| -> Option<String> {
        e.attributes().flatten().find_map(|a| {
            (a.key.as_ref() == name.as_bytes())
                .then(|| String::from_utf8_lossy(&a.value).into_owned())
        })
    };

    loop {
        let event = r.read_event_into(&mut buf).map_err(xml_err)?;
        let self_closing = matches!(event, Event::Empty(_));
        match event {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) => match e.name().as_ref() {
                b"key" => {
                    let id = attr_of(&e, "id").unwrap_or_default();
                    let for_node = attr_of(&e, "for").as_deref() == Some("node");
                    let name = attr_of(&e, "attr.name").unwrap_or_else(|| id.clone());
                    keys.insert(id, (for_node, name));
                }
                b"node" => {
                    let id = attr_of(&e, "id").ok_or_else(|| xml_err("node without id"))?;
                    nodes.push(id.clone());
                    if !self_closing {
                        ctx.node_id = Some(id);
                    }
                }
                b"edge" => {
                    let source =
                        attr_of(&e, "source").ok_or_else(|| xml_err("edge without source"))?;
                    let target =
                        attr_of(&e, "target").ok_or_else(|| xml_err("edge without target"))?;
                    if self_closing {
                        edges.push((source, target, 1));
                    } else {
                        ctx.edge = Some((source, target));
                        ctx.edge_weight = None;
                    }
                }
                b"data" if !self_closing => {
                    ctx.data_key = attr_of(&e, "key");
                    ctx.text.clear();
                }
                _ => {}
            },
            Event::Text(t) => {
                ctx.text.push_str(&t.unescape().map_err(xml_err)?);
            }
            Event::End(e) => match e.name().as_ref() {
                b"data" => {
                    let key = ctx.data_key.take().unwrap_or_default();
                    if let Some(node_id) = &ctx.node_id {
                        if let Some((true, name)) = keys.get(&key) {
                            attributes
                                .entry(node_id.clone())
                                .or_default()
                                .insert(name.clone(), ctx.text.clone());
                        }
                    } else if ctx.edge.is_some() {
                        let is_weight = keys
                            .get(&key)
                            .map(|(for_node, name)| !for_node && name == "weight")
                            .unwrap_or(key == "weight");
                        if is_weight {
                            ctx.edge_weight = Some(ctx.text.trim().parse().map_err(|_| {
                                xml_err(format!("bad edge weight '{}'", ctx.text))
                            })?);
                        }
                    }
                    ctx.text.clear();
                }
                b"node" => ctx.node_id = None,
                b"edge" => {
                    if let Some((source, target)) = ctx.edge.take() {
                        edges.push((source, target, ctx.edge_weight.take().unwrap_or(1)));
                    }
                }
                _ => {}
            },
            _ => {}
        }
        buf.clear();
    }

    let mut g = CharacterGraph::from_parts(nodes, edges)?;
    for (id, attrs) in attributes {
        for (k, v) in attrs {
            g.set_attribute(&id, &k, &v)?;
        }
    }
    Ok(g)
}
