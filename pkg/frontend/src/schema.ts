// Field descriptors for the profile form. Mirrors the service's packaged
// schema (same names, bounds and answer levels); /health exposes the serving
// artifact hash if a deployment needs to verify the pairing.

export type FieldKind = "binary" | "ordinal" | "nominal" | "numeric";

export interface FieldOption {
  value: number;
  label: string;
}

export interface FieldDef {
  name: string;
  label: string;
  kind: FieldKind;
  lower: number;
  upper: number;
  actionable: boolean;
  options?: FieldOption[];
}

export const FIELDS: FieldDef[] = [
  {
    "name": "room_ventilation",
    "label": "Room cross-ventilation",
    "kind": "ordinal",
    "lower": 1,
    "upper": 5,
    "actionable": true,
    "options": [
      {
        "value": 1,
        "label": "1 - Strongly Disagree"
      },
      {
        "value": 2,
        "label": "2"
      },
      {
        "value": 3,
        "label": "3"
      },
      {
        "value": 4,
        "label": "4"
      },
      {
        "value": 5,
        "label": "5 - Strongly Agree"
      }
    ]
  },
  {
    "name": "nighttime_quietness",
    "label": "Nighttime quietness",
    "kind": "ordinal",
    "lower": 1,
    "upper": 5,
    "actionable": true,
    "options": [
      {
        "value": 1,
        "label": "1 - Strongly Disagree"
      },
      {
        "value": 2,
        "label": "2"
      },
      {
        "value": 3,
        "label": "3"
      },
      {
        "value": 4,
        "label": "4"
      },
      {
        "value": 5,
        "label": "5 - Strongly Agree"
      }
    ]
  },
  {
    "name": "caffeine_intake_timing",
    "label": "Last caffeine intake time",
    "kind": "ordinal",
    "lower": 0,
    "upper": 4,
    "actionable": true,
    "options": [
      {
        "value": 0,
        "label": "After 12 AM"
      },
      {
        "value": 1,
        "label": "10 PM - 12 AM"
      },
      {
        "value": 2,
        "label": "8 PM - 10 PM"
      },
      {
        "value": 3,
        "label": "6-8 PM"
      },
      {
        "value": 4,
        "label": "I don't drink in this period"
      }
    ]
  },
  {
    "name": "lighting_condition",
    "label": "Lighting condition",
    "kind": "ordinal",
    "lower": 1,
    "upper": 5,
    "actionable": true,
    "options": [
      {
        "value": 1,
        "label": "1 - Strongly Disagree"
      },
      {
        "value": 2,
        "label": "2"
      },
      {
        "value": 3,
        "label": "3"
      },
      {
        "value": 4,
        "label": "4"
      },
      {
        "value": 5,
        "label": "5 - Strongly Agree"
      }
    ]
  },
  {
    "name": "sleeping_posture",
    "label": "Sleeping posture",
    "kind": "ordinal",
    "lower": 0,
    "upper": 4,
    "actionable": true,
    "options": [
      {
        "value": 0,
        "label": "Stomach sleeping (lying on your stomach)"
      },
      {
        "value": 1,
        "label": "Combination (switching between different postures)"
      },
      {
        "value": 2,
        "label": "Right facing"
      },
      {
        "value": 3,
        "label": "Left facing"
      },
      {
        "value": 4,
        "label": "Back sleeping (lying on your back)"
      }
    ]
  },
  {
    "name": "screen_use_before_sleep",
    "label": "Screen use before sleep",
    "kind": "ordinal",
    "lower": 0,
    "upper": 4,
    "actionable": true,
    "options": [
      {
        "value": 0,
        "label": "0-5 minutes before bed"
      },
      {
        "value": 1,
        "label": "30 minutes before bed"
      },
      {
        "value": 2,
        "label": "1 hour before bed"
      },
      {
        "value": 3,
        "label": "2 hour before bed"
      },
      {
        "value": 4,
        "label": "More than 3 hour before bed"
      }
    ]
  },
  {
    "name": "sleep_schedule_consistency",
    "label": "Consistent sleep schedule",
    "kind": "ordinal",
    "lower": 1,
    "upper": 5,
    "actionable": true,
    "options": [
      {
        "value": 1,
        "label": "1 - Never"
      },
      {
        "value": 2,
        "label": "2"
      },
      {
        "value": 3,
        "label": "3"
      },
      {
        "value": 4,
        "label": "4"
      },
      {
        "value": 5,
        "label": "5 - Always"
      }
    ]
  },
  {
    "name": "gender",
    "label": "Gender",
    "kind": "nominal",
    "lower": 0,
    "upper": 2,
    "actionable": false,
    "options": [
      {
        "value": 0,
        "label": "Male"
      },
      {
        "value": 1,
        "label": "Female"
      },
      {
        "value": 2,
        "label": "Others"
      }
    ]
  },
  {
    "name": "age_band",
    "label": "Age band",
    "kind": "ordinal",
    "lower": 0,
    "upper": 3,
    "actionable": false,
    "options": [
      {
        "value": 0,
        "label": "Under 18"
      },
      {
        "value": 1,
        "label": "18-21"
      },
      {
        "value": 2,
        "label": "22-25"
      },
      {
        "value": 3,
        "label": "26+"
      }
    ]
  },
  {
    "name": "bmi_category",
    "label": "BMI category",
    "kind": "ordinal",
    "lower": 0,
    "upper": 3,
    "actionable": false,
    "options": [
      {
        "value": 0,
        "label": "Underweight"
      },
      {
        "value": 1,
        "label": "Normal"
      },
      {
        "value": 2,
        "label": "Overweight"
      },
      {
        "value": 3,
        "label": "Obese"
      }
    ]
  },
  {
    "name": "academic_workload",
    "label": "Daily work/study hours",
    "kind": "ordinal",
    "lower": 0,
    "upper": 4,
    "actionable": false,
    "options": [
      {
        "value": 0,
        "label": "Less than 1 hours"
      },
      {
        "value": 1,
        "label": "1-2 hours"
      },
      {
        "value": 2,
        "label": "2-4 hours"
      },
      {
        "value": 3,
        "label": "4-6 hours"
      },
      {
        "value": 4,
        "label": "More than 6 hours"
      }
    ]
  },
  {
    "name": "physical_activity",
    "label": "Daily physical activity",
    "kind": "ordinal",
    "lower": 0,
    "upper": 4,
    "actionable": false,
    "options": [
      {
        "value": 0,
        "label": "Less than 15 minutes"
      },
      {
        "value": 1,
        "label": "15-30 minutes"
      },
      {
        "value": 2,
        "label": "30-60 minutes"
      },
      {
        "value": 3,
        "label": "60-120 minutes"
      },
      {
        "value": 4,
        "label": "More than 120 minutes"
      }
    ]
  },
  {
    "name": "financial_stress",
    "label": "Financial stress",
    "kind": "ordinal",
    "lower": 1,
    "upper": 5,
    "actionable": false,
    "options": [
      {
        "value": 1,
        "label": "1 - Strongly Disagree"
      },
      {
        "value": 2,
        "label": "2"
      },
      {
        "value": 3,
        "label": "3"
      },
      {
        "value": 4,
        "label": "4"
      },
      {
        "value": 5,
        "label": "5 - Strongly Agree"
      }
    ]
  },
  {
    "name": "headache_neck_pain",
    "label": "Headache / neck pain",
    "kind": "ordinal",
    "lower": 1,
    "upper": 5,
    "actionable": false,
    "options": [
      {
        "value": 1,
        "label": "1 - Strongly Disagree"
      },
      {
        "value": 2,
        "label": "2"
      },
      {
        "value": 3,
        "label": "3"
      },
      {
        "value": 4,
        "label": "4"
      },
      {
        "value": 5,
        "label": "5 - Strongly Agree"
      }
    ]
  },
  {
    "name": "sleep_env_score",
    "label": "Sleep environment score",
    "kind": "numeric",
    "lower": 4,
    "upper": 20,
    "actionable": false
  }
];

export const LAMBDA_MIN = 0;
export const LAMBDA_MAX = 0.6;
export const LAMBDA_STEP = 0.05;
export const LAMBDA_DEFAULT = 0.2;
