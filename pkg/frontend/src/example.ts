/**
 * Frozen demo fixture: the feature schema, one example inventory row, and
 * the service's exact prediction for it.  Generated by
 * scripts/generate-example.py; regenerate after retraining, do not edit.
 */

import type { PredictResponse, SchemaResponse } from "./types.js";

export const EXAMPLE_SCHEMA: SchemaResponse = {
  "features": [
    "volume",
    "area",
    "n_points",
    "intensity_mean_o",
    "coplanararity_i_mean_d",
    "angles_mean",
    "positive_volume",
    "orientation_mean_o",
    "slope_mean_o",
    "n_orientations_o",
    "class_3_mean",
    "colinearity_i_sigma_o",
    "class_2_mean",
    "colinearity_i_mean_d",
    "class_3_sigma",
    "slope_mean_d",
    "intensity_sigma_o",
    "angles_sigma",
    "negative_volume",
    "coplanararity_i_sigma_o",
    "x",
    "y",
    "z",
    "n_order",
    "class_1_mean",
    "class_1_sigma",
    "class_2_sigma",
    "class_4_mean",
    "class_4_sigma",
    "intensity_mean_d",
    "intensity_sigma_d",
    "correlation_i",
    "orientation_mean_d",
    "coplanararity_i_mean_o",
    "colinearity_i_mean_o",
    "coplanararity_i_sigma_d"
  ],
  "positive_label": "Candidate",
  "pipeline": "KNN-SMOTE/36"
};

export const EXAMPLE_ROW: Record<string, number> = {
  "volume": 1.6175138967751268,
  "area": 1.9748085312349262,
  "n_points": 198.56360521757404,
  "intensity_mean_o": 1514.3864963930032,
  "coplanararity_i_mean_d": 0.7028875333577717,
  "angles_mean": 43.66753916721667,
  "positive_volume": 1.0014006984328172,
  "orientation_mean_o": 233.1060617316061,
  "slope_mean_o": 54.166312531559655,
  "n_orientations_o": 6.6629237137131785,
  "class_3_mean": 0.26271467060641807,
  "colinearity_i_sigma_o": 0.10040702175694283,
  "class_2_mean": 0.500408635325288,
  "colinearity_i_mean_d": 0.223765086534388,
  "class_3_sigma": 0.09490373112999072,
  "slope_mean_d": 48.56309939993039,
  "intensity_sigma_o": 335.209923118734,
  "angles_sigma": 11.909272779894186,
  "negative_volume": 0.35402343810108333,
  "coplanararity_i_sigma_o": 0.1515898061295457,
  "x": 390.8856820892548,
  "y": 275.6703843087978,
  "z": 63.75300037956305,
  "n_order": 2.7753111844589036,
  "class_1_mean": 0.5581832369541151,
  "class_1_sigma": 0.10347210679086874,
  "class_2_sigma": 0.0692765663764501,
  "class_4_mean": 0.21146116457130174,
  "class_4_sigma": 0.08667646878074291,
  "intensity_mean_d": 1719.5289536181763,
  "intensity_sigma_d": 228.45398881983039,
  "correlation_i": 0.15326399314706887,
  "orientation_mean_d": 110.84978585664318,
  "coplanararity_i_mean_o": 0.8147946190593308,
  "colinearity_i_mean_o": 0.32803334084551505,
  "coplanararity_i_sigma_d": 0.14543767956768222
};

export const EXAMPLE_PREDICTION: PredictResponse = {
  "label": "Candidate",
  "score": 1.0,
  "pipeline": "KNN-SMOTE/36"
};
