"""pano3d: deterministic assembly and re-projection evaluation of
single-image panoptic 3D scenes."""

from .alignment import (
    PlacedThing,
    chamfer_distance,
    depth_extent,
    estimate_z_center,
    normalized_depth_extent,
    place_mesh,
)
from .backproject import DepthMap, LabeledPointCloud, backproject_stuff, filter_depth
from .camera import (
    CameraIntrinsics,
    depth_to_inverse,
    intrinsics_from_fov,
    inverse_to_depth,
    project,
    unproject,
)
from .dataset import (
    ImageRecord,
    InstanceEntry,
    SplitResult,
    decode_panoptic_png,
    encode_panoptic_png,
    load_panoptic,
    read_records_jsonl,
    save_panoptic,
    split_and_filter,
    write_records_jsonl,
)
from .imageio import (
    load_depth_png,
    load_mask_png,
    load_pfm,
    save_depth_png,
    save_mask_png,
    save_pfm,
)
from .losses import (
    CenteredFlag,
    FlagReason,
    LossLedger,
    aggregate_loss,
    classify_boundary,
    frustum_validity,
)
from .masks import BBox, BinaryMask, bbox_of_mask, mask_iou
from .mesh import (
    TriangleMesh,
    load_normalized_mesh,
    load_obj,
    load_ply_points,
    save_obj,
    save_ply_mesh,
    save_ply_points,
)
from .metrics import PanopticMetrics, evaluate_reprojection, panoptic_quality
from .panoptic import InstanceObservation, PanopticMap, SegmentInfo, fuse_panoptic
from .pipeline import (
    Manifest,
    ManifestOptions,
    assemble_scene,
    export_reprojection,
    load_manifest,
    load_scene,
    save_scene,
)
from .raster import rasterize_scene
from .scene import LayoutBox, Scene3D, layout_box_to_stuff_meshes

__version__ = "0.1.0"
