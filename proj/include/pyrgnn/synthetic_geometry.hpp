#pragma once

// Geometry constants of the synthetic easy/hard benchmark.
//
// Only the qualitative recipe is fixed (five 2-D clusters on a horizontal
// line, each a Gaussian blob, two moons or concentric circles, k-NN graph,
// one-hot cluster colors). The numbers below were calibrated so that the
// generated corpora match the target averages: about 148 vertices per
// graph and about 923 (easy) / 572 (hard) stored adjacency entries, i.e.
// each undirected edge counted in both directions.
//
// Vertex counts: 5 clusters of uniform [20, 39] points, mean 29.5 -> 147.5.
//
// Edge counts hardly depend on the shapes or the noise level; they are set
// by the number of neighbours and the rate at which k-NN links are mutual
// (about 70% for these shapes). Easy links every point to its 5 nearest other
// points (~950 entries). Hard counts the point itself among its k = 4
// neighbours, so it links to 3 others (~580 entries); linking to 4 others
// would give ~770, far above the hard target.

namespace pyrgnn::synthetic_geometry {

inline constexpr int kClusters = 5;
inline constexpr int kPointsMin = 20;
inline constexpr int kPointsMax = 39;

// Horizontal distance between neighbouring cluster centres, in units of the
// shape radius. Neighbouring clusters overlap on purpose: the k-NN graph then
// links them, so the class (the left-to-right order of shapes) is visible to
// a message-passing model. With disjoint clusters (spacing >= 3) each graph
// splits into five components and the order is lost.
inline constexpr double kSpacing = 1.8;
// Uniform jitter applied to each cluster centre (both axes).
inline constexpr double kCenterJitter = 0.15;

// Per-difficulty noise. Easy clusters are compact; hard clusters are wider
// and their shapes blur into each other.
inline constexpr double kEasySpread = 0.06;
inline constexpr double kHardSpread = 0.16;

inline constexpr double kBlobSigmaScale = 5.0;  // blob std = spread * scale
inline constexpr double kInnerCircleRatio = 0.45;

inline constexpr int kEasyK = 5;
inline constexpr bool kEasyIncludeSelf = false;
inline constexpr int kHardK = 4;
inline constexpr bool kHardIncludeSelf = true;

}  // namespace pyrgnn::synthetic_geometry
