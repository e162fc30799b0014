"""Dataset split and filtering walkthrough: split images by house, invalidate
shape models that leak across the train/test boundary, and drop images left
without any valid centered instance.

Run:  python3 demos/demo_split_dataset.py
"""

import numpy as np

from pano3d import ImageRecord, InstanceEntry, split_and_filter


def main():
    rng = np.random.default_rng(7)
    houses = [f"house_{i}" for i in range(6)]
    # each house furnishes mostly its own models; one sofa ships to every house
    house_models = {h: [f"chair_{i}_{j}" for j in range(3)] for i, h in enumerate(houses)}
    shared = "sofa_shared"

    records = []
    for i in range(18):
        house = houses[i % len(houses)]
        pool = house_models[house]
        instances = [
            InstanceEntry(
                instance_id=j,
                model_id=pool[int(rng.integers(0, len(pool)))],
                category_id=3,
                centered=bool(rng.integers(0, 2)),
            )
            for j in range(int(rng.integers(1, 4)))
        ]
        if house in ("house_0", "house_4"):  # the shared sofa leaks across the split
            instances.append(
                InstanceEntry(
                    instance_id=len(instances), model_id=shared, category_id=4, centered=True
                )
            )
        instances = tuple(instances)
        records.append(ImageRecord(image_id=f"img_{i:03d}", house_id=house, instances=instances))
    models = sorted({i.model_id for r in records for i in r.instances})

    print(f"{len(records)} images across {len(houses)} houses, {len(models)} shape models")

    result = split_and_filter(records, houses, train_count=4)
    print(f"train houses: {houses[:4]}")
    print(f"test houses:  {houses[4:]}")
    print(f"models seen in both splits (invalidated): {sorted(result.invalidated_models)}")
    print(f"kept {len(result.train)} train images, {len(result.test)} test images")

    for name, split in (("train", result.train), ("test", result.test)):
        print(f"\n{name}:")
        for r in split:
            marks = [
                f"{i.model_id}{'' if i.valid else '(invalid)'}{'*' if i.centered else ''}"
                for i in r.instances
            ]
            print(f"  {r.image_id} [{r.house_id}]: {', '.join(marks)}")
    print("\n(* = centered instance; invalid = model removed for leaking across splits)")


if __name__ == "__main__":
    main()
