# coding: utf-8

# # Scoring detections and cutting tiles
#
# Ground truth and detections use the DOTA text layout. Both are parsed into
# records and scored class by class.

from attnpoints import evaluate, parse_annotation, parse_detections, plan_tiles

gt_text = """imagesource:GoogleEarth
gsd:0.146
100 100 140 100 140 120 100 120 plane 0
300 300 330 310 320 340 290 330 ship 0
500 500 520 500 520 510 500 510 ship 1
"""
gts = list(parse_annotation(gt_text, "P0001").records)

plane_dets = parse_detections("P0001 0.95 101 99 141 101 139 121 99 119\n", "plane")
ship_dets = parse_detections(
    "P0001 0.90 700 700 730 700 730 720 700 720\n"  # nothing there
    "P0001 0.60 301 300 331 311 320 341 289 330\n"
    "P0001 0.55 500 500 520 500 520 510 500 510\n",  # the difficult ship
    "ship",
)

report = evaluate(plane_dets + ship_dets, gts, (0.5, 0.75), "voc07")
print(report.format_table())
print("difficult ships are left out of the count:", report.num_gt)

# Large scenes are cut into overlapping windows before detection.

for size in [800, 1024, 2048, 3000]:
    plan = plan_tiles(size, size, 1024, 524)
    print(size, "px ->", len(plan), "tiles")
print(plan_tiles(2048, 1500).to_text("P0001"))
