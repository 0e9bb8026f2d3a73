"""
Faces, edges and vertices of small cube partitions
===================================================

Split a box into blocks of hexahedra and count the globs of the interface.
"""

from bddc_corners import classify_mesh, generate_structured, select_corners
from bddc_corners.mesh import StructuredSpec

for shape in [(1, 1, 2), (2, 2, 1), (2, 2, 2), (3, 3, 3)]:
    mesh, part = generate_structured(StructuredSpec(2, shape))
    cls = classify_mesh(mesh, part)
    c = cls.counts()
    print(f"{shape}: {cls.interface_nodes.size:4d} interface nodes, "
          f"{c['face']} faces, {c['edge']} edges, {c['vertex']} vertices")

# the centre node of the 2x2x2 split is shared by all eight blocks
mesh, part = generate_structured(StructuredSpec(2, (2, 2, 2)))
cls = classify_mesh(mesh, part)
vertex = cls.globs_of_kind("vertex")[0]
print("vertex", int(vertex.nodes[0]), "at", mesh.nodes[vertex.nodes[0]], "shared by", vertex.sharing_set)

# basic corner sets of the three strategies
for alg in ("full", "minimal", "edge"):
    print(f"{alg:8s}", len(select_corners(cls, alg)), "corners")
