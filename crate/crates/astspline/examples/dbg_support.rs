//! Throwaway: trace the support BFS of anchor 1 on ep_disk(3,3).

use astspline::corpus;
use astspline::extraction::knots::{anchor_knots, place_support};
use astspline::mesh::classify::classify;
use astspline::mesh::{build_tmesh, FaceClass};

fn main() {
    let input = corpus::ep_disk(3, 3);
    let mesh = build_tmesh(&input).unwrap();
    let cls = classify(&mesh);
    println!("faces: {}", mesh.num_faces());
    for (f, c) in cls.face_class.iter().enumerate() {
        if *c != FaceClass::Regular {
            println!("face {f}: {c:?} corners {:?}", mesh.faces[f].corners());
        }
    }
    println!("eps: {:?}", cls.eps);
    println!("vertex 1 kind: {:?}", cls.kinds[1]);
    println!("star of 1: faces {:?}", mesh.stars[1].faces);

    let frames = astspline::extraction::knots::all_frames(&mesh).unwrap();
    let anchor = anchor_knots(&mesh, &cls, &frames, 1).unwrap();
    println!("anchor 1 knots u {:?} v {:?}", anchor.knots_u.0, anchor.knots_v.0);
    match place_support(&mesh, &cls, &frames, &anchor) {
        Ok(sup) => println!("support ok: {} faces", sup.len()),
        Err(e) => println!("support error: {e}"),
    }
}
